#!/usr/bin/env python3
"""Generate the sample project-cashflow workbooks.

cashflow.wb     monthly wage, dividend and revenue cashflows for 1000 months
                driven by named inputs, plus a lookup table, a sumproduct
                block and a checks sheet with row/column total invariants.
cashflow_v2.wb  identical except for one formula (the construction total
                picks up an extra 0.01), used for regression and staleness.

Every cashflow is rounded to a whole number, so column totals and row totals
agree exactly and the invariant cells compare with plain '='.

Usage: make_cashflow.py [OUTDIR]
"""

import sys
from pathlib import Path

FIRST_ROW = 31
MONTHS = 1000
LAST_ROW = FIRST_ROW + MONTHS - 1

NAMES = {
    "ConstructionMonths": "Inputs!B5",
    "ConstructionTotal": "Checks!X68",
    "ConstructionWages": "Inputs!B4",
    "Dividend": "Inputs!B8",
    "Inflationpa": "Inputs!B2",
    "LookupKey": "Lookups!F2",
    "OperationMonths": "Inputs!B7",
    "OperationTotal": "Checks!X69",
    "OperationWages": "Inputs!B6",
    "Revenue": "Inputs!B9",
    "TotalDividends": "Checks!X70",
    "WageInflation": "Inputs!B3",
}

INPUTS = [
    ("Annual inflation", 0.03),
    ("Annual wage inflation", 0.05),
    ("Monthly construction wages", -30),
    ("Construction months", 12),
    ("Monthly operation wages", -33),
    ("Operation months", 53),
    ("Monthly dividend", 10),
    ("Monthly revenue", 100),
]


def quote(text):
    return '"' + text.replace('"', '""') + '"'


def sheet(name, cells):
    lines = ["", f"[sheet {name}]"]
    # Cells must be row-major: row first, then column number.
    def key(item):
        ref = item[0]
        col = "".join(ch for ch in ref if ch.isalpha())
        row = int("".join(ch for ch in ref if ch.isdigit()))
        num = 0
        for ch in col:
            num = num * 26 + ord(ch) - 64
        return row, num

    for ref, content in sorted(cells, key=key):
        lines.append(f"{ref} = {content}")
    return lines


def number(x):
    return repr(x) if isinstance(x, float) else str(x)


def inputs_sheet():
    cells = [("A1", quote("Input")), ("B1", quote("Value"))]
    for i, (label, value) in enumerate(INPUTS, start=2):
        cells.append((f"A{i}", quote(label)))
        cells.append((f"B{i}", number(value)))
    return sheet("Inputs", cells)


def cashflow_sheet():
    cells = []
    for col, title in zip("BCDEFGHI", ["Year", "Month", "Construction wages", "Operation wages",
                                        "Wage factor", "Total", "Dividends", "Revenue"]):
        cells.append((f"{col}30", quote(title)))
    operating = "AND(C{r}>ConstructionMonths,C{r}<=ConstructionMonths+OperationMonths)"
    for i in range(MONTHS):
        r = FIRST_ROW + i
        cells += [
            (f"B{r}", str(i // 12)),
            (f"C{r}", str(i + 1)),
            (f"D{r}", f"=IF(C{r}<=ConstructionMonths,ROUND(ConstructionWages*F{r},0),0)"),
            (f"E{r}", f"=IF({operating.format(r=r)},ROUND(OperationWages*F{r},0),0)"),
            (f"F{r}", f"=(1+WageInflation)^B{r}"),
            (f"G{r}", f"=D{r}+E{r}+H{r}+I{r}"),
            (f"H{r}", f"=IF({operating.format(r=r)},ROUND(Dividend*(1+Inflationpa)^B{r},0),0)"),
            (f"I{r}", f"=IF({operating.format(r=r)},ROUND(Revenue*(1+Inflationpa)^B{r},0),0)"),
        ]
    return sheet("Project Cashflows", cells)


def lookups_sheet():
    # Rate table keyed by band in column B. F3 reads the wrong column (2
    # instead of 3): the sentinel lookup test is meant to catch it.
    cells = [("B2", quote("Band")), ("C2", quote("Low")), ("D2", quote("High")),
             ("E2", quote("Key")), ("F2", "2"),
             ("E3", quote("High rate")), ("F3", "=VLOOKUP(LookupKey,B3:D5,2,FALSE)")]
    for i, (band, low, high) in enumerate([(1, 0.01, 0.02), (2, 0.015, 0.025), (3, 0.02, 0.04)]):
        r = 3 + i
        cells += [(f"B{r}", str(band)), (f"C{r}", number(low)), (f"D{r}", number(high))]
    cells += [("B9", quote("Weight")), ("C9", quote("Amount")), ("E10", quote("Weighted")),
              ("F10", "=SUMPRODUCT(B10:B14,C10:C14)")]
    for i, (w, a) in enumerate([(0.1, 120), (0.2, 80), (0.4, 95), (0.2, 60), (0.1, 150)]):
        r = 10 + i
        cells += [(f"B{r}", number(w)), (f"C{r}", str(a))]
    return sheet("Lookups", cells)


def checks_sheet(v2):
    rng = lambda c: f"'Project Cashflows'!{c}{FIRST_ROW}:{c}{LAST_ROW}"
    construction = f"=SUM({rng('D')})" + ("+0.01" if v2 else "")
    cells = [
        ("W62", quote("Static tests")),
        ("W63", quote("Sum of total cashflow = sum of individual cashflows")),
        ("W64", quote("Actual")), ("X64", f"=SUM({rng('G')})"),
        ("W65", quote("Expected")),
        ("X65", f"=SUM({rng('D')})+SUM({rng('E')})+SUM({rng('H')})+SUM({rng('I')})"),
        ("W66", quote("Result")), ("X66", '=IF(X65=X64,"Pass","Fail")'),
        ("Y63", quote("Wage factor never below 1")),
        ("Y64", f"=MIN({rng('F')})"), ("Y65", "1"),
        ("Y66", '=IF(Y64>=Y65,"Pass","Fail")'),
        ("W68", quote("Construction wages")), ("X68", construction),
        ("W69", quote("Operation wages")), ("X69", f"=SUM({rng('E')})"),
        ("W70", quote("Dividends")), ("X70", f"=SUM({rng('H')})"),
        ("W71", quote("Max wage factor")), ("X71", f"=MAX({rng('F')})"),
        ("W72", quote("Min wage factor")), ("X72", f"=MIN({rng('F')})"),
        ("W73", quote("Net cashflow")), ("X73", "=X64"),
    ]
    return sheet("Checks", cells)


def workbook(v2=False):
    lines = [f"[name {n} = {NAMES[n]}]" for n in sorted(NAMES, key=str.upper)]
    lines += inputs_sheet() + cashflow_sheet() + lookups_sheet() + checks_sheet(v2)
    return "\n".join(lines) + "\n"


def main():
    out = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).parent
    (out / "cashflow.wb").write_text(workbook(), encoding="utf-8", newline="\n")
    (out / "cashflow_v2.wb").write_text(workbook(v2=True), encoding="utf-8", newline="\n")


if __name__ == "__main__":
    main()
