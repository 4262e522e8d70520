"""Turn tokenised documents into bag-of-words binary CSV rows.

Input: one document per line, ``label<TAB>word id word id ...``.
Output: presence bits over ``--vocab`` word ids followed by the label.
"""

import argparse
import sys

from tsmverify.data import bag_of_words, dumps_binary_csv


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("docs")
    ap.add_argument("--vocab", type=int, required=True)
    a = ap.parse_args()
    rows = []
    with open(a.docs, encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            label, _, ids = line.partition("\t")
            rows.append(bag_of_words([int(t) for t in ids.split()], a.vocab, int(label)))
    sys.stdout.write(dumps_binary_csv(rows))


if __name__ == "__main__":
    main()
