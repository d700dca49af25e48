#!/usr/bin/env python3
"""Write the LexGLUE classification tasks as train/valid/test tsv files.

Creates one directory per task (ecthr_a, ecthr_b, scotus, eurlex, ledgar,
unfair_tos). Label names have spaces replaced by underscores. Requires the
`datasets` package and network access on first use.
"""

import argparse
import re
from pathlib import Path

TASKS = ["ecthr_a", "ecthr_b", "scotus", "eurlex", "ledgar", "unfair_tos"]
SPLITS = {"train": "train.tsv", "validation": "valid.tsv", "test": "test.tsv"}


def clean(text):
    if isinstance(text, list):
        text = " ".join(text)
    return re.sub(r"\s+", " ", text).strip()


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("out", nargs="?", default="data/lexglue", type=Path)
    parser.add_argument("--tasks", nargs="*", default=TASKS)
    args = parser.parse_args()

    from datasets import load_dataset

    for task in args.tasks:
        ds = load_dataset("lex_glue", task)
        features = ds["train"].features
        multi = "labels" in features
        names = (features["labels"].feature if multi else features["label"]).names
        names = [re.sub(r"\s+", "_", n) for n in names]
        out = args.out / task
        out.mkdir(parents=True, exist_ok=True)
        for split, filename in SPLITS.items():
            with open(out / filename, "w", encoding="utf-8") as f:
                for row in ds[split]:
                    ids = row["labels"] if multi else [row["label"]]
                    labels = " ".join(sorted({names[i] for i in ids}))
                    f.write(f"{labels}\t{clean(row['text'])}\n")
        print(f"wrote {out}")


if __name__ == "__main__":
    main()
