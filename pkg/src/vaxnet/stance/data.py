"""CSV readers/writers for labeled texts and rater triples."""

from __future__ import annotations

import csv
from typing import Iterable

from .model import LabeledExample


class SchemaError(ValueError):
    pass


def _require(reader: csv.DictReader, columns, path) -> None:
    header = reader.fieldnames or []
    for col in columns:
        if col not in header:
            raise SchemaError(f"{path}: missing column {col!r}")


def read_labeled_csv(path) -> list[LabeledExample]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        _require(reader, ("text", "label"), path)
        return [LabeledExample(row["text"], row["label"].strip()) for row in reader]


def write_labeled_csv(examples: Iterable[LabeledExample], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["text", "label"])
        for e in examples:
            writer.writerow([e.text, e.label])


def read_ratings_csv(path) -> list[tuple[str, list[str]]]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        _require(reader, ("text", "r1", "r2", "r3"), path)
        return [(row["text"], [row["r1"].strip(), row["r2"].strip(), row["r3"].strip()]) for row in reader]


def write_ratings_csv(rows: Iterable[tuple[str, list[str]]], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["text", "r1", "r2", "r3"])
        for text, labels in rows:
            writer.writerow([text, *labels])
