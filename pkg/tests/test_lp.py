import random
from fractions import Fraction

import pytest

from fixedprice import RationalLP, solve_lp
from fixedprice.errors import LPInfeasibleError, LPUnboundedError
from fixedprice.rational import format_rational, parse_rational, round_to_rational


class TestRationalParsing:
    def test_forms(self):
        assert parse_rational("1/6") == Fraction(1, 6)
        assert parse_rational("0.25") == Fraction(1, 4)
        assert parse_rational(3) == 3
        assert format_rational(Fraction(7, 6)) == "7/6"
        assert format_rational(Fraction(4, 2)) == "2"

    def test_floats_rejected_in_strict_parse(self):
        with pytest.raises(ValueError):
            parse_rational(0.25)

    def test_round_to_rational_recovers_small_fractions(self):
        x = Fraction(1, 3) + Fraction(1, 10**40)
        assert round_to_rational(x, Fraction(1, 10**30)) == Fraction(1, 3)

    def test_round_to_rational_negative(self):
        x = Fraction(-2, 7) - Fraction(1, 10**35)
        assert round_to_rational(x, Fraction(1, 10**30)) == Fraction(-2, 7)


class TestSimplex:
    def test_single_variable(self):
        lp = RationalLP()
        lp.add_variable("x")
        lp.add_row({"x": 1}, "<=", 1)
        lp.set_objective({"x": 1})
        sol = solve_lp(lp)
        assert sol.value == 1 and sol["x"] == 1

    def test_two_variable_vertex(self):
        lp = RationalLP()
        lp.add_variable("x")
        lp.add_variable("y")
        lp.add_row({"x": 1, "y": 2}, "<=", 4)
        lp.add_row({"x": 3, "y": 1}, "<=", 6)
        lp.set_objective({"x": 3, "y": 2})
        sol = solve_lp(lp)
        assert (sol.value, sol["x"], sol["y"]) == (
            Fraction(36, 5), Fraction(8, 5), Fraction(6, 5)
        )

    def test_equality_and_shifted_bounds(self):
        lp = RationalLP()
        lp.add_variable("u", lo=-5, hi=5)
        lp.add_variable("v", lo=0, hi=3)
        lp.add_row({"u": 1, "v": 1}, "==", 2)
        lp.set_objective({"u": -1, "v": 2})
        sol = solve_lp(lp)
        assert sol.value == 7 and sol["u"] == -1 and sol["v"] == 3

    def test_infeasible_reported(self):
        lp = RationalLP()
        lp.add_variable("x", hi=1)
        lp.add_row({"x": 1}, ">=", 2)
        lp.set_objective({"x": 1})
        with pytest.raises(LPInfeasibleError):
            solve_lp(lp)

    def test_unbounded_reported(self):
        lp = RationalLP()
        lp.add_variable("x")
        lp.set_objective({"x": 1})
        with pytest.raises(LPUnboundedError):
            solve_lp(lp)

    def test_duplicate_rows_merge(self):
        lp = RationalLP()
        lp.add_variable("x")
        assert lp.add_row({"x": 1}, "<=", 1)
        assert not lp.add_row({"x": 1}, "<=", 1)
        assert lp.num_rows == 1

    def test_degenerate_vertex(self):
        lp = RationalLP()
        for v in ("x", "y", "z"):
            lp.add_variable(v)
        lp.add_row({"x": 1, "y": 1}, ">=", 2)
        lp.add_row({"x": 1, "y": 1, "z": 1}, "<=", 2)
        lp.add_row({"z": 1}, "<=", 0)
        lp.set_objective({"x": 1, "y": 3, "z": 5})
        assert solve_lp(lp).value == 6

    def test_matches_float_solver_on_random_problems(self):
        opt = pytest.importorskip("scipy.optimize")
        rng = random.Random(101)
        for _ in range(40):
            n = rng.randint(1, 5)
            m = rng.randint(1, 6)
            lp = RationalLP()
            for i in range(n):
                lp.add_variable(f"x{i}", lo=0, hi=rng.randint(1, 4))
            rows = []
            for _ in range(m):
                coefs = {
                    f"x{i}": Fraction(rng.randint(-3, 3)) for i in range(n)
                }
                rhs = Fraction(rng.randint(0, 6))
                lp.add_row(coefs, "<=", rhs)
                rows.append((coefs, rhs))
            obj = {f"x{i}": Fraction(rng.randint(-3, 3)) for i in range(n)}
            lp.set_objective(obj)
            sol = solve_lp(lp)  # bounded by boxes, feasible at 0
            c = [-float(obj[f"x{i}"]) for i in range(n)]
            A = [[float(coefs.get(f"x{i}", 0)) for i in range(n)] for coefs, _ in rows]
            b = [float(rhs) for _, rhs in rows]
            bounds = [(0, float(lp.variables[i].hi)) for i in range(n)]
            ref = opt.linprog(c, A_ub=A, b_ub=b, bounds=bounds, method="highs")
            assert ref.success
            assert abs(float(sol.value) - (-ref.fun)) < 1e-7

    def test_vertex_solution_is_basic(self):
        # a vertex of this square must be a corner, not the face midpoint
        lp = RationalLP()
        lp.add_variable("x", hi=1)
        lp.add_variable("y", hi=1)
        lp.set_objective({"x": 1})
        sol = solve_lp(lp)
        assert sol["x"] == 1 and sol["y"] in (Fraction(0), Fraction(1))

    def test_text_export_mentions_rows_and_bounds(self):
        lp = RationalLP()
        lp.add_variable("x", hi=Fraction(1, 2))
        lp.add_row({"x": Fraction(1, 3)}, "<=", Fraction(1, 6), label="cap")
        lp.set_objective({"x": 1})
        text = lp.to_text()
        assert "max: 1 x" in text
        assert "cap: 1/3 x <= 1/6" in text
        assert "bound: 0 <= x <= 1/2" in text
