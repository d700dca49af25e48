#!/usr/bin/env python3
"""Write 20 Newsgroups (bydate) as train/valid/test tsv files.

1,132 training documents are held out as the validation split, leaving
10,182 for training; the test split has 7,532 documents. Requires
scikit-learn and network access on first use.
"""

import argparse
import random
import re
from pathlib import Path


def clean(text):
    return re.sub(r"[\t\r\n]+", " ", text).strip()


def write(path, docs, names):
    with open(path, "w", encoding="utf-8") as f:
        for text, target in docs:
            f.write(f"{names[target]}\t{clean(text)}\n")


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("out", nargs="?", default="data/20news", type=Path)
    parser.add_argument("--valid-size", type=int, default=1132)
    parser.add_argument("--seed", type=int, default=1)
    args = parser.parse_args()

    from sklearn.datasets import fetch_20newsgroups

    train = fetch_20newsgroups(subset="train", shuffle=False)
    test = fetch_20newsgroups(subset="test", shuffle=False)
    names = train.target_names

    docs = list(zip(train.data, train.target))
    order = list(range(len(docs)))
    random.Random(args.seed).shuffle(order)
    held = set(order[: args.valid_size])

    args.out.mkdir(parents=True, exist_ok=True)
    write(args.out / "train.tsv", [d for i, d in enumerate(docs) if i not in held], names)
    write(args.out / "valid.tsv", [d for i, d in enumerate(docs) if i in held], names)
    write(args.out / "test.tsv", list(zip(test.data, test.target)), names)
    print(f"wrote {args.out}: {len(docs) - len(held)} train, {len(held)} valid, {len(test.data)} test")


if __name__ == "__main__":
    main()
