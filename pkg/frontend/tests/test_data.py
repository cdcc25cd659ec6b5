"""CSV contract validation."""
import numpy as np
import pytest
from numpy.testing import assert_array_equal

from plotkit.data import CsvFormatError, read_box, read_profile

TWO_SOLVERS = """\
solver,alpha,rho
a,1.0,0.6666666666666666
a,2.0,0.6666666666666666
a,4.0,1.0
b,1.0,0.6666666666666666
b,2.0,1.0
b,4.0,1.0
"""

BOX = """\
basis_label,metric,value
1,gradient,0.5
2,gradient,0.25
1,gradient,0.75
1,hessian,0.9
"""


def write(tmp_path, text, name="in.csv"):
    path = tmp_path / name
    path.write_text(text)
    return path


def test_read_profile_two_solvers(tmp_path):
    curves = read_profile(write(tmp_path, TWO_SOLVERS))
    assert list(curves) == ["a", "b"]
    alphas, rhos = curves["a"]
    assert_array_equal(alphas, [1.0, 2.0, 4.0])
    assert_array_equal(rhos, [2 / 3, 2 / 3, 1.0])
    assert_array_equal(curves["b"][1], [2 / 3, 1.0, 1.0])


def test_read_profile_rejects_bad_inputs(tmp_path):
    cases = [
        "",
        "solver,alpha\nx,1\n",
        "solver,alpha,rho\n",
        "solver,alpha,rho\na,1.0\n",
        "solver,alpha,rho\na,one,0.5\n",
        "solver,alpha,rho\na,1.0,much\n",
        "solver,alpha,rho\na,0.0,0.5\n",
        "solver,alpha,rho\na,-2.0,0.5\n",
        "solver,alpha,rho\na,1.0,1.5\n",
        "solver,alpha,rho\na,1.0,-0.1\n",
        "solver,alpha,rho\na,1.0,0.8\na,2.0,0.5\n",
        "solver,alpha,rho\na,2.0,0.5\na,1.0,0.8\n",
    ]
    for text in cases:
        with pytest.raises(CsvFormatError):
            read_profile(write(tmp_path, text))


def test_read_profile_missing_file(tmp_path):
    with pytest.raises(CsvFormatError):
        read_profile(tmp_path / "nope.csv")


def test_read_box_groups_in_file_order(tmp_path):
    groups = read_box(write(tmp_path, BOX))
    assert list(groups) == ["gradient", "hessian"]
    assert list(groups["gradient"]) == ["1", "2"]
    assert groups["gradient"]["1"] == [0.5, 0.75]
    assert groups["hessian"]["1"] == [0.9]


def test_read_box_rejects_bad_inputs(tmp_path):
    for text in ("", "a,b,c\n1,gradient,0.5\n",
                 "basis_label,metric,value\n",
                 "basis_label,metric,value\n1,gradient,none\n"):
        with pytest.raises(CsvFormatError):
            read_box(write(tmp_path, text))
