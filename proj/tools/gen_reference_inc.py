#!/usr/bin/env python3
"""Regenerate src/reference_data.inc from data/reference/*.csv.

The library embeds the reference curves so the regression gate works
without runtime data files; the CSVs stay the human-readable source.
"""
import csv
import os

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))


def read_total(name):
    rows = []
    with open(os.path.join(ROOT, "data", "reference", name)) as f:
        for row in list(csv.reader(f))[1:]:
            rows.append((int(row[0]), row[1]))
    return rows


def read_split(name):
    a, b = [], []
    with open(os.path.join(ROOT, "data", "reference", name)) as f:
        for row in list(csv.reader(f))[1:]:
            if row[1]:
                a.append((int(row[0]), row[1]))
            if row[2]:
                b.append((int(row[0]), row[2]))
    return a, b


def emit(f, cname, rows):
    f.write(f"constexpr RefPoint {cname}[] = {{\n")
    for i in range(0, len(rows), 6):
        chunk = ", ".join(f"{{{m}, {v}}}" for m, v in rows[i:i + 6])
        f.write(f"    {chunk},\n")
    f.write("};\n")


def main():
    fig4a = read_total("fig4a.csv")
    fig4b = read_total("fig4b.csv")
    f5a_a, f5a_b = read_split("fig5a.csv")
    f5b_a, f5b_b = read_split("fig5b.csv")
    out = os.path.join(ROOT, "src", "reference_data.inc")
    with open(out, "w") as f:
        f.write("// Generated by tools/gen_reference_inc.py from data/reference/*.csv.\n")
        f.write("// Do not edit by hand.\n")
        emit(f, "kRefTotalLowSkew", fig4a)
        emit(f, "kRefTotalHighSkew", fig4b)
        emit(f, "kRefNodeLowSkew", f5a_a)
        emit(f, "kRefSbsLowSkew", f5a_b)
        emit(f, "kRefNodeHighSkew", f5b_a)
        emit(f, "kRefSbsHighSkew", f5b_b)
    print(f"wrote {out}")


if __name__ == "__main__":
    main()
