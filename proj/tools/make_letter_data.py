#!/usr/bin/env python3
"""Rebuild the public OCR letter file (letter.data.gz) from a local copy.

The original distribution (Kassel / Taskar OCR letters) is a tab-separated
file with one glyph per line:

    id  letter  next_id  word_id  position  fold  p_0_0 ... p_15_7

The same corpus ships inside the pystruct wheel as ``letters.pickle``
(words as lists of 128-pixel rows plus fold labels). This script reads that
pickle, either from an installed pystruct, a wheel path, or a raw pickle
path, and writes the tab-separated form.

Usage:
    python3 tools/make_letter_data.py --wheel pystruct-0.3.2-...whl -o data/letter.data.gz
    python3 tools/make_letter_data.py --pickle letters.pickle -o data/letter.data.gz
"""

import argparse
import gzip
import io
import pickle
import sys
import zipfile


def load_pickle(args):
    if args.pickle:
        with open(args.pickle, "rb") as fh:
            return pickle.load(fh, encoding="latin1")
    if args.wheel:
        with zipfile.ZipFile(args.wheel) as zf:
            raw = zf.read("pystruct/datasets/letters.pickle")
        return pickle.load(io.BytesIO(raw), encoding="latin1")
    from pystruct.datasets import load_letters  # type: ignore

    return load_letters()


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--wheel")
    parser.add_argument("--pickle")
    parser.add_argument("-o", "--output", default="data/letter.data.gz")
    args = parser.parse_args()

    data = load_pickle(args)
    lines = []
    glyph_id = 1
    for word_index, (labels, pixels, fold) in enumerate(
        zip(data["labels"], data["data"], data["folds"])
    ):
        for position, (label, row) in enumerate(zip(labels, pixels), start=1):
            last = position == len(labels)
            fields = [
                str(glyph_id),
                chr(ord("a") + int(label)),
                "-1" if last else str(glyph_id + 1),
                str(word_index + 1),
                str(position),
                str(int(fold)),
            ]
            fields.extend(str(int(p)) for p in row)
            lines.append("\t".join(fields))
            glyph_id += 1

    payload = ("\n".join(lines) + "\n").encode("ascii")
    if args.output.endswith(".gz"):
        # mtime=0 keeps the archive byte-stable across rebuilds
        with open(args.output, "wb") as raw:
            with gzip.GzipFile(fileobj=raw, mode="wb", mtime=0, filename="") as fh:
                fh.write(payload)
    else:
        with open(args.output, "wb") as fh:
            fh.write(payload)
    print(f"wrote {glyph_id - 1} glyphs in {len(data['labels'])} words to {args.output}",
          file=sys.stderr)


if __name__ == "__main__":
    main()
