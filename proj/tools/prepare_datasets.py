#!/usr/bin/env python3
"""Rebuild data/*.csv from the copies of the UCI files shipped inside PyPI wheels.

The UCI host is not always reachable, so the benchmark tables are taken from
wheels that redistribute them verbatim:

  keel-ds       wisconsin.dat (Breast Cancer Wisconsin, original, 683 complete rows)
                magic.dat     (MAGIC Gamma Telescope, 19020 rows)
  responsibly   german.data   (Statlog German Credit, 1000 rows, symbolic codes)

German Credit attributes are symbolic codes of the form A<attribute><level>;
each is replaced by its integer level so every column is numeric.
"""
import argparse
import pathlib
import subprocess
import sys
import tempfile
import zipfile

WBC_COLUMNS = [
    "clump_thickness", "cell_size_uniformity", "cell_shape_uniformity",
    "marginal_adhesion", "single_epithelial_cell_size", "bare_nuclei",
    "bland_chromatin", "normal_nucleoli", "mitoses", "class",
]
GERMAN_COLUMNS = [
    "checking_status", "duration_months", "credit_history", "purpose",
    "credit_amount", "savings", "employment_since", "installment_rate",
    "personal_status_sex", "other_debtors", "residence_since", "property",
    "age_years", "other_installment_plans", "housing", "existing_credits",
    "job", "people_liable", "telephone", "foreign_worker", "class",
]
TELESCOPE_COLUMNS = [
    "fLength", "fWidth", "fSize", "fConc", "fConc1", "fAsym", "fM3Long",
    "fM3Trans", "fAlpha", "fDist", "class",
]


def fetch(package, workdir):
    subprocess.run(
        [sys.executable, "-m", "pip", "download", "--no-deps", "-q", "-d",
         str(workdir), package],
        check=True)
    return next(pathlib.Path(workdir).glob(package.replace("-", "_") + "-*.whl"))


def rows(text, sep=","):
    for line in text.splitlines():
        line = line.strip()
        if line and not line.startswith("@"):
            yield [cell.strip() for cell in line.split(sep)]


def decode_german(row):
    out = []
    for attr, cell in enumerate(row[:-1], start=1):
        prefix = "A%d" % attr
        out.append(cell[len(prefix):] if cell.startswith(prefix) else cell)
    out.append(row[-1])
    return out


def write_csv(path, header, records):
    with open(path, "w", newline="\n") as f:
        f.write(",".join(header) + "\n")
        for r in records:
            f.write(",".join(r) + "\n")
    print("wrote", path)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", default=str(pathlib.Path(__file__).resolve().parent.parent / "data"))
    args = parser.parse_args()
    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    with tempfile.TemporaryDirectory() as tmp:
        keel = zipfile.ZipFile(fetch("keel-ds", tmp))
        resp = zipfile.ZipFile(fetch("responsibly", tmp))
        wbc = keel.read("keel_ds/data/balanced/raw/wisconsin.dat").decode()
        magic = keel.read("keel_ds/data/balanced/raw/magic.dat").decode()
        german = resp.read("responsibly/dataset/german/german.data").decode()

    write_csv(out / "wbc.csv", WBC_COLUMNS, rows(wbc))
    write_csv(out / "german.csv", GERMAN_COLUMNS,
              (decode_german(r) for r in rows(german, sep=" ") if len(r) == 21))
    write_csv(out / "telescope.csv", TELESCOPE_COLUMNS, rows(magic))


if __name__ == "__main__":
    main()
