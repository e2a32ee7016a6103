"""Flat-file persistence for corpora.

Layout: households.csv, surveys.csv, verifications.csv, transactions.csv,
blocks.csv, localities.csv, ground_truth.csv (hidden sidecar), and
corpus_meta.json carrying the config echo, seed, and schema version.
All files are UTF-8, comma-delimited, with ISO-8601 dates. Floats are
written with `repr` so a save/load round trip is exact.
"""

from __future__ import annotations

import csv
import datetime as dt
import json
from pathlib import Path
from typing import Iterator

from . import schema
from .types import (
    CensusBlock,
    Corpus,
    CorpusConfig,
    GroundTruth,
    Household,
    LabelValue,
    Locality,
    LocationClass,
    PovertyIndicator,
    Survey,
    Transaction,
    VerificationRecord,
    VerificationStatus,
)

SCHEMA_VERSION = 1

_FILES = (
    "households.csv",
    "surveys.csv",
    "verifications.csv",
    "transactions.csv",
    "blocks.csv",
    "localities.csv",
    "ground_truth.csv",
    "corpus_meta.json",
)


class CorpusParseError(ValueError):
    """Malformed or schema-violating corpus file; names file, line, and field."""

    def __init__(self, file: str, line: int, field: str, message: str):
        self.file, self.line, self.field = file, line, field
        super().__init__(f"{file}:{line}: field '{field}': {message}")


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def save_corpus(corpus: Corpus, directory: str | Path) -> Path:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    _write_meta(corpus.config, directory / "corpus_meta.json")
    _write_households(corpus, directory / "households.csv")
    _write_surveys(corpus, directory / "surveys.csv")
    _write_verifications(corpus, directory / "verifications.csv")
    _write_transactions(corpus, directory / "transactions.csv")
    _write_blocks(corpus, directory / "blocks.csv")
    _write_localities(corpus, directory / "localities.csv")
    _write_ground_truth(corpus, directory / "ground_truth.csv")
    return directory


def load_corpus(directory: str | Path) -> Corpus:
    directory = Path(directory)
    for name in _FILES:
        if not (directory / name).exists():
            raise CorpusParseError(name, 0, "-", f"missing file in corpus directory {directory}")
    config = _read_meta(directory / "corpus_meta.json")
    corpus = Corpus(config=config)
    corpus.households.update(_read_households(directory / "households.csv"))
    corpus.surveys.update(_read_surveys(directory / "surveys.csv"))
    corpus.verifications.update(_read_verifications(directory / "verifications.csv"))
    corpus.transactions.extend(_read_transactions(directory / "transactions.csv"))
    corpus.blocks.update(_read_blocks(directory / "blocks.csv"))
    corpus.localities.update(_read_localities(directory / "localities.csv"))
    corpus.ground_truth.update(_read_ground_truth(directory / "ground_truth.csv"))
    return corpus


def _write_meta(config: CorpusConfig, path: Path) -> None:
    payload = {
        "schema_version": SCHEMA_VERSION,
        "seed": config.seed,
        "config": config_to_dict(config),
    }
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def config_to_dict(config: CorpusConfig) -> dict:
    return {
        "n_households": config.n_households,
        "n_regions": config.n_regions,
        "n_localities": config.n_localities,
        "n_blocks_per_locality": config.n_blocks_per_locality,
        "n_programs": config.n_programs,
        "locality_known_fraction": config.locality_known_fraction,
        "block_known_fraction": config.block_known_fraction,
        "verification_fraction": config.verification_fraction,
        "target_any_discrepancy_rate": config.target_any_discrepancy_rate,
        "target_leq3_share": config.target_leq3_share,
        "social_security_lack_prevalence": config.social_security_lack_prevalence,
        "label_missing_rate": config.label_missing_rate,
        "answer_missing_rate": config.answer_missing_rate,
        "overreport_bias": [[q, b] for q, b in config.overreport_bias],
        "default_overreport_bias": config.default_overreport_bias,
        "geographic_signal": config.geographic_signal,
        "programmatic_signal": config.programmatic_signal,
        "income_understate_scale": config.income_understate_scale,
        "urban_lines": list(config.urban_lines),
        "rural_lines": list(config.rural_lines),
        "seed": config.seed,
    }


def config_from_dict(data: dict) -> CorpusConfig:
    kwargs = dict(data)
    kwargs["overreport_bias"] = tuple((q, float(b)) for q, b in kwargs.get("overreport_bias", []))
    kwargs["urban_lines"] = tuple(kwargs.get("urban_lines", (1_650.0, 3_250.0)))
    kwargs["rural_lines"] = tuple(kwargs.get("rural_lines", (1_150.0, 2_150.0)))
    return CorpusConfig(**kwargs)


def _read_meta(path: Path) -> CorpusConfig:
    try:
        payload = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise CorpusParseError(path.name, exc.lineno, "-", f"invalid JSON: {exc.msg}") from exc
    if payload.get("schema_version") != SCHEMA_VERSION:
        raise CorpusParseError(path.name, 1, "schema_version",
                               f"unsupported version {payload.get('schema_version')}")
    try:
        return config_from_dict(payload["config"])
    except (KeyError, TypeError, ValueError) as exc:
        raise CorpusParseError(path.name, 1, "config", str(exc)) from exc


class _Reader:
    """CSV reader that reports (file, line, field) on every failure."""

    def __init__(self, path: Path, required: list[str] | None = None):
        self.path = path
        self.name = path.name
        with path.open(encoding="utf-8", newline="") as fh:
            rows = list(csv.reader(fh))
        if not rows:
            raise CorpusParseError(self.name, 1, "-", "empty file, header expected")
        self.header = rows[0]
        self.rows = rows[1:]
        seen = set()
        for col in self.header:
            if col in seen:
                raise CorpusParseError(self.name, 1, col, "duplicate column")
            seen.add(col)
        for col in required or []:
            if col not in seen:
                raise CorpusParseError(self.name, 1, col, "missing required column")
        self.index = {col: i for i, col in enumerate(self.header)}

    def records(self) -> Iterator[tuple[int, dict[str, str]]]:
        for offset, row in enumerate(self.rows):
            line = offset + 2
            if len(row) != len(self.header):
                raise CorpusParseError(
                    self.name, line, "-",
                    f"expected {len(self.header)} fields, got {len(row)}",
                )
            yield line, {col: row[self.index[col]] for col in self.header}

    def fail(self, line: int, field: str, message: str) -> CorpusParseError:
        return CorpusParseError(self.name, line, field, message)


def _parse_float(reader: _Reader, line: int, field: str, raw: str) -> float:
    try:
        return float(raw)
    except ValueError:
        raise reader.fail(line, field, f"not a number: {raw!r}") from None


def _parse_int(reader: _Reader, line: int, field: str, raw: str) -> int:
    try:
        return int(raw)
    except ValueError:
        raise reader.fail(line, field, f"not an integer: {raw!r}") from None


def _parse_bool(reader: _Reader, line: int, field: str, raw: str) -> bool:
    if raw == "true":
        return True
    if raw == "false":
        return False
    raise reader.fail(line, field, f"expected true/false, got {raw!r}")


def _write_households(corpus: Corpus, path: Path) -> None:
    with path.open("w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["household_id", "region_id", "locality_id", "block_id",
                    "block_latitude", "block_longitude", "location_class", "n_members"])
        for hh_id in corpus.household_ids:
            h = corpus.households[hh_id]
            lat, lon = h.block_coords if h.block_coords else (None, None)
            w.writerow([h.household_id, h.region_id, _fmt(h.locality_id), _fmt(h.block_id),
                        _fmt(lat), _fmt(lon), h.location_class.value, h.n_members])


def _read_households(path: Path) -> dict[str, Household]:
    reader = _Reader(path, ["household_id", "region_id", "locality_id", "block_id",
                            "block_latitude", "block_longitude", "location_class", "n_members"])
    out: dict[str, Household] = {}
    for line, rec in reader.records():
        lat_raw, lon_raw = rec["block_latitude"], rec["block_longitude"]
        coords = None
        if lat_raw or lon_raw:
            coords = (_parse_float(reader, line, "block_latitude", lat_raw),
                      _parse_float(reader, line, "block_longitude", lon_raw))
        try:
            location = LocationClass(rec["location_class"])
        except ValueError:
            raise reader.fail(line, "location_class", f"unknown class {rec['location_class']!r}") from None
        try:
            hh = Household(
                household_id=rec["household_id"],
                region_id=rec["region_id"],
                locality_id=rec["locality_id"] or None,
                block_id=rec["block_id"] or None,
                block_coords=coords,
                location_class=location,
                n_members=_parse_int(reader, line, "n_members", rec["n_members"]),
            )
        except CorpusParseError:
            raise
        except ValueError as exc:
            raise reader.fail(line, "household_id", str(exc)) from None
        out[hh.household_id] = hh
    return out


def _survey_columns() -> list[str]:
    cols = ["household_id", "self_reported_income", "estimated_income"]
    cols += [f"label_{ind.value}" for ind in PovertyIndicator.ordered()]
    cols += [f"q_{qid}" for qid in schema.QUESTION_IDS]
    return cols


def _write_surveys(corpus: Corpus, path: Path) -> None:
    with path.open("w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(_survey_columns())
        for hh_id in sorted(corpus.surveys):
            s = corpus.surveys[hh_id]
            row = [s.household_id, _fmt(s.self_reported_income), _fmt(s.estimated_income)]
            row += [s.label(ind).value for ind in PovertyIndicator.ordered()]
            row += [_fmt(s.answers.get(qid)) for qid in schema.QUESTION_IDS]
            w.writerow(row)


def _read_surveys(path: Path) -> dict[str, Survey]:
    reader = _Reader(path, ["household_id", "self_reported_income", "estimated_income"])
    for col in reader.header:
        if col.startswith("q_") and col[2:] not in schema.QUESTIONS_BY_ID:
            raise reader.fail(1, col, f"unknown question_id {col[2:]!r}")
    out: dict[str, Survey] = {}
    for line, rec in reader.records():
        answers: dict = {}
        for qid, question in schema.QUESTIONS_BY_ID.items():
            raw = rec.get(f"q_{qid}", "")
            if raw == "":
                continue
            field = f"q_{qid}"
            if question.kind == "numeric":
                answers[qid] = _parse_float(reader, line, field, raw)
            elif question.kind == "boolean":
                answers[qid] = _parse_bool(reader, line, field, raw)
            else:
                if raw not in question.levels:
                    raise reader.fail(line, field, f"unknown level {raw!r}")
                answers[qid] = raw
        labels: dict[PovertyIndicator, LabelValue] = {}
        for ind in PovertyIndicator.ordered():
            field = f"label_{ind.value}"
            raw = rec.get(field, LabelValue.MISSING.value)
            try:
                labels[ind] = LabelValue(raw)
            except ValueError:
                raise reader.fail(line, field, f"unknown label {raw!r}") from None
        try:
            survey = Survey(
                household_id=rec["household_id"],
                answers=answers,
                self_reported_income=_parse_float(reader, line, "self_reported_income",
                                                  rec["self_reported_income"]),
                estimated_income=_parse_float(reader, line, "estimated_income",
                                              rec["estimated_income"]),
                indicator_labels=labels,
            )
        except CorpusParseError:
            raise
        except ValueError as exc:
            raise reader.fail(line, "household_id", str(exc)) from None
        out[survey.household_id] = survey
    return out


def _write_verifications(corpus: Corpus, path: Path) -> None:
    with path.open("w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["household_id", "surveyor_flag"]
                   + [f"v_{qid}" for qid in schema.VERIFIABLE_QUESTION_IDS])
        for hh_id in sorted(corpus.verifications):
            rec = corpus.verifications[hh_id]
            row = [rec.household_id, _fmt(rec.surveyor_flag)]
            for qid in schema.VERIFIABLE_QUESTION_IDS:
                status = rec.entries.get(qid)
                row.append(status.value if status else "")
            w.writerow(row)


def _read_verifications(path: Path) -> dict[str, VerificationRecord]:
    reader = _Reader(path, ["household_id", "surveyor_flag"])
    for col in reader.header:
        if col.startswith("v_") and col[2:] not in schema.VERIFIABLE_QUESTION_IDS:
            raise reader.fail(1, col, f"not a verifiable question: {col[2:]!r}")
    out: dict[str, VerificationRecord] = {}
    for line, rec in reader.records():
        entries: dict[str, VerificationStatus] = {}
        for qid in schema.VERIFIABLE_QUESTION_IDS:
            raw = rec.get(f"v_{qid}", "")
            if raw == "":
                continue
            try:
                entries[qid] = VerificationStatus(raw)
            except ValueError:
                raise reader.fail(line, f"v_{qid}", f"unknown status {raw!r}") from None
        out[rec["household_id"]] = VerificationRecord(
            household_id=rec["household_id"],
            entries=entries,
            surveyor_flag=_parse_bool(reader, line, "surveyor_flag", rec["surveyor_flag"]),
        )
    return out


def _write_transactions(corpus: Corpus, path: Path) -> None:
    with path.open("w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["household_id", "program_id", "benefit_id", "amount", "date"])
        for t in corpus.transactions:
            w.writerow([t.household_id, t.program_id, t.benefit_id, _fmt(t.amount),
                        t.date.isoformat()])


def _read_transactions(path: Path) -> list[Transaction]:
    reader = _Reader(path, ["household_id", "program_id", "benefit_id", "amount", "date"])
    out: list[Transaction] = []
    for line, rec in reader.records():
        try:
            date = dt.date.fromisoformat(rec["date"])
        except ValueError:
            raise reader.fail(line, "date", f"not an ISO date: {rec['date']!r}") from None
        try:
            txn = Transaction(
                household_id=rec["household_id"],
                program_id=rec["program_id"],
                benefit_id=rec["benefit_id"],
                amount=_parse_float(reader, line, "amount", rec["amount"]),
                date=date,
            )
        except CorpusParseError:
            raise
        except ValueError as exc:
            raise reader.fail(line, "amount", str(exc)) from None
        out.append(txn)
    return out


def _write_blocks(corpus: Corpus, path: Path) -> None:
    agg_names = sorted({name for b in corpus.blocks.values() for name in b.aggregates})
    with path.open("w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["block_id", "locality_id", "latitude", "longitude"]
                   + [f"agg_{name}" for name in agg_names])
        for bid in sorted(corpus.blocks):
            b = corpus.blocks[bid]
            w.writerow([b.block_id, b.locality_id, _fmt(b.coords[0]), _fmt(b.coords[1])]
                       + [_fmt(b.aggregates.get(name)) for name in agg_names])


def _read_blocks(path: Path) -> dict[str, CensusBlock]:
    reader = _Reader(path, ["block_id", "locality_id", "latitude", "longitude"])
    agg_cols = [c for c in reader.header if c.startswith("agg_")]
    out: dict[str, CensusBlock] = {}
    for line, rec in reader.records():
        aggregates = {}
        for col in agg_cols:
            if rec[col] == "":
                continue
            value = _parse_float(reader, line, col, rec[col])
            if not (0.0 <= value <= 1.0):
                raise reader.fail(line, col, f"aggregate {value} outside [0, 1]")
            aggregates[col[4:]] = value
        out[rec["block_id"]] = CensusBlock(
            block_id=rec["block_id"],
            locality_id=rec["locality_id"],
            coords=(_parse_float(reader, line, "latitude", rec["latitude"]),
                    _parse_float(reader, line, "longitude", rec["longitude"])),
            aggregates=aggregates,
        )
    return out


def _write_localities(corpus: Corpus, path: Path) -> None:
    with path.open("w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["locality_id", "region_id", "latitude", "longitude", "location_class"])
        for lid in sorted(corpus.localities):
            loc = corpus.localities[lid]
            w.writerow([loc.locality_id, loc.region_id, _fmt(loc.coords[0]), _fmt(loc.coords[1]),
                        loc.location_class.value])


def _read_localities(path: Path) -> dict[str, Locality]:
    reader = _Reader(path, ["locality_id", "region_id", "latitude", "longitude", "location_class"])
    out: dict[str, Locality] = {}
    for line, rec in reader.records():
        try:
            location = LocationClass(rec["location_class"])
        except ValueError:
            raise reader.fail(line, "location_class", f"unknown class {rec['location_class']!r}") from None
        out[rec["locality_id"]] = Locality(
            locality_id=rec["locality_id"],
            region_id=rec["region_id"],
            coords=(_parse_float(reader, line, "latitude", rec["latitude"]),
                    _parse_float(reader, line, "longitude", rec["longitude"])),
            location_class=location,
        )
    return out


def _write_ground_truth(corpus: Corpus, path: Path) -> None:
    with path.open("w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["household_id"]
                   + [f"true_{ind.value}" for ind in PovertyIndicator.ordered()]
                   + ["underreport_propensity", "development_level"])
        for hh_id in sorted(corpus.ground_truth):
            gt = corpus.ground_truth[hh_id]
            w.writerow([gt.household_id]
                       + [_fmt(gt.true_indicators[ind]) for ind in PovertyIndicator.ordered()]
                       + [_fmt(gt.underreport_propensity), _fmt(gt.development_level)])


def _read_ground_truth(path: Path) -> dict[str, GroundTruth]:
    reader = _Reader(path, ["household_id", "underreport_propensity", "development_level"])
    out: dict[str, GroundTruth] = {}
    for line, rec in reader.records():
        true_indicators = {
            ind: _parse_bool(reader, line, f"true_{ind.value}", rec.get(f"true_{ind.value}", ""))
            for ind in PovertyIndicator.ordered()
        }
        out[rec["household_id"]] = GroundTruth(
            household_id=rec["household_id"],
            true_indicators=true_indicators,
            underreport_propensity=_parse_float(reader, line, "underreport_propensity",
                                                rec["underreport_propensity"]),
            development_level=_parse_float(reader, line, "development_level",
                                           rec["development_level"]),
        )
    return out
