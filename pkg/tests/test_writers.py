# CDD Chain Simulator - Result writer tests
# Copyright (C) 2025-2026 CDD Chain contributors
#
# SPDX-License-Identifier: GPL-3.0-or-later
# See LICENSE file for full license text.

import json
import os
import xml.etree.ElementTree as ET

import numpy as np
import pandas as pd
import pytest
from openpyxl import load_workbook

from CDD_Chain.errors import ConstraintViolation
from CDD_Chain.experiment_config import parse_config
from CDD_Chain.noise_lab import OUParams, ou_trajectory
from CDD_Chain.run_experiment import ResultTable, RunResult
from CDD_Chain.writers import emit_csv, emit_svg, emit_xlsx, write_run


def make_table(name="curves", columns=("exact C(1,4)",), n=3) -> ResultTable:
    t = np.linspace(0.0, 1.0, n)
    data = {"t": t}
    for k, column in enumerate(columns):
        data[column] = np.sin(t + k) ** 2 / 3.0
    return ResultTable(name, pd.DataFrame(data))


def make_result(tables) -> RunResult:
    cfg = parse_config({"preset": "ising-entanglement"})
    noise = ou_trajectory(OUParams(), 0.1, 0.05, seed=1)
    return RunResult(cfg, tables, {"package_version": "0.1.0", "tables": []}, [(tables[0].name, noise)])


def svg_elements(path):
    return list(ET.parse(path).getroot().iter())


def test_csv_has_header_and_one_line_per_point(tmp_path):
    (path,) = emit_csv([make_table()], str(tmp_path))
    lines = open(path, encoding="utf-8").read().splitlines()
    assert len(lines) == 4
    assert lines[0] == "t,exact C(1,4)"


def test_csv_keeps_full_precision(tmp_path):
    table = make_table(columns=("exact F(0001)", "effective F(0001)"), n=17)
    (path,) = emit_csv([table], str(tmp_path))
    back = pd.read_csv(path, float_precision="round_trip")
    assert np.array_equal(back.to_numpy(), table.frame.to_numpy())


def test_empty_grid_writes_no_file(tmp_path):
    empty = ResultTable("empty", pd.DataFrame({"t": [], "exact C(1,2)": []}))
    with pytest.raises(ConstraintViolation):
        emit_csv([make_table("first"), empty], str(tmp_path / "out"))
    assert not os.path.exists(tmp_path / "out")
    with pytest.raises(ConstraintViolation):
        emit_csv([], str(tmp_path))
    with pytest.raises(ConstraintViolation):
        emit_csv([ResultTable("bare", pd.DataFrame({"t": [0.0, 1.0]}))], str(tmp_path))


def test_svg_single_curve(tmp_path):
    path = emit_svg(make_table(n=50), str(tmp_path / "plot.svg"))
    ids = [e.get("id") for e in svg_elements(path)]
    assert sum(1 for i in ids if i and i.startswith("curve-")) == 1
    assert "legend-entry-0" in ids


def test_svg_two_curves(tmp_path):
    table = make_table(columns=("exact C(1,4)", "effective C(1,4)"), n=50)
    path = emit_svg(table, str(tmp_path / "nested" / "plot.svg"), style={"title": "two curves"})
    ids = [e.get("id") for e in svg_elements(path)]
    assert {"curve-0", "curve-1", "legend-entry-0", "legend-entry-1"} <= set(ids)
    assert sum(1 for i in ids if i and i.startswith("legend-entry-")) == 2


def test_xlsx_workbook(tmp_path):
    tables = [make_table("first"), make_table("second", columns=("exact P(1,4)", "jw P(1,4)"))]
    path = emit_xlsx(tables, str(tmp_path / "run.xlsx"))
    wb = load_workbook(path)
    assert wb.sheetnames == ["first", "second"]
    ws = wb["second"]
    assert [c.value for c in ws[1]] == ["t", "exact P(1,4)", "jw P(1,4)"]
    assert ws.max_row == 4
    assert ws["A1"].font.bold
    assert ws["A1"].fill.start_color.rgb.endswith("FFA500")
    assert ws.freeze_panes == "A2"
    assert list(ws.tables) == ["Results2"]
    assert ws["B2"].value == pytest.approx(tables[1].frame.iloc[0, 1])


def test_write_run_artifacts(tmp_path):
    tables = [make_table("ising-entanglement")]
    paths = write_run(make_result(tables), str(tmp_path), svg=True, xlsx=True, noise_csv=True)
    names = [os.path.basename(p) for p in paths]
    assert names == [
        "ising-entanglement.csv",
        "ising-entanglement.svg",
        "ising-entanglement.xlsx",
        "ising-entanglement_noise_r0.csv",
        "ising-entanglement_metadata.json",
    ]
    metadata = json.loads(open(paths[-1], encoding="utf-8").read())
    assert metadata["package_version"] == "0.1.0"
    noise = pd.read_csv(paths[3])
    assert list(noise.columns) == ["t", "Bx", "By", "Bz"]


def test_write_run_minimal(tmp_path):
    paths = write_run(make_result([make_table("only")]), str(tmp_path))
    assert [os.path.basename(p) for p in paths] == ["only.csv", "ising-entanglement_metadata.json"]
