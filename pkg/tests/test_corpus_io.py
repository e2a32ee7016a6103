"""Round-trip and parse-error behavior of the flat-file corpus format."""

import pytest

from povml.corpus import CorpusConfig, CorpusParseError, generate_corpus, load_corpus, save_corpus


@pytest.fixture(scope="module")
def small_corpus():
    return generate_corpus(CorpusConfig(n_households=400, seed=31))


def test_round_trip_equality(small_corpus, tmp_path):
    save_corpus(small_corpus, tmp_path)
    assert load_corpus(tmp_path) == small_corpus


def test_truncated_transactions_reports_line(small_corpus, tmp_path):
    save_corpus(small_corpus, tmp_path)
    path = tmp_path / "transactions.csv"
    lines = path.read_text().splitlines()
    lines[3] = lines[3].rsplit(",", 2)[0]  # drop two fields on data line 3
    path.write_text("\n".join(lines) + "\n")
    with pytest.raises(CorpusParseError) as err:
        load_corpus(tmp_path)
    assert err.value.file == "transactions.csv"
    assert err.value.line == 4  # header + 3 data rows


def test_unknown_question_id_is_schema_error(small_corpus, tmp_path):
    save_corpus(small_corpus, tmp_path)
    path = tmp_path / "surveys.csv"
    lines = path.read_text().splitlines()
    lines[0] = lines[0].replace("q_owns_stove", "q_owns_helicopter")
    path.write_text("\n".join(lines) + "\n")
    with pytest.raises(CorpusParseError) as err:
        load_corpus(tmp_path)
    assert "owns_helicopter" in str(err.value)
    assert err.value.line == 1


def test_bad_number_names_field(small_corpus, tmp_path):
    save_corpus(small_corpus, tmp_path)
    path = tmp_path / "surveys.csv"
    lines = path.read_text().splitlines()
    parts = lines[1].split(",")
    parts[1] = "not-a-number"  # self_reported_income
    lines[1] = ",".join(parts)
    path.write_text("\n".join(lines) + "\n")
    with pytest.raises(CorpusParseError) as err:
        load_corpus(tmp_path)
    assert err.value.field == "self_reported_income"
    assert err.value.line == 2


def test_out_of_range_aggregate_rejected(small_corpus, tmp_path):
    save_corpus(small_corpus, tmp_path)
    path = tmp_path / "blocks.csv"
    lines = path.read_text().splitlines()
    parts = lines[1].split(",")
    parts[4] = "1.7"
    lines[1] = ",".join(parts)
    path.write_text("\n".join(lines) + "\n")
    with pytest.raises(CorpusParseError) as err:
        load_corpus(tmp_path)
    assert err.value.file == "blocks.csv"


def test_missing_file_reported(small_corpus, tmp_path):
    save_corpus(small_corpus, tmp_path)
    (tmp_path / "localities.csv").unlink()
    with pytest.raises(CorpusParseError) as err:
        load_corpus(tmp_path)
    assert err.value.file == "localities.csv"
