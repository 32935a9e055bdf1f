import numpy as np
import pytest

from eqsched.instance import IDLE, Instance, Schedule, count_preemptions, validate_schedule
from eqsched.oracle import brute_force, brute_force_memo, enumerate_feasible
from tests.conftest import random_small_instance


class TestBruteForce:
    def test_worked_example_optimum(self, worked_example):
        assert brute_force(worked_example).optimum == 182

    def test_two_job_example(self, two_job_example):
        result = brute_force(two_job_example)
        assert result.optimum == 21
        # DFS tries job ids in order, so the block schedule comes out first
        assert result.schedule == Schedule.of([1, 1, 1, 2, 2, 2])

    def test_single_job_formula(self):
        for p in (1, 2, 3):
            for r in (1, 2, 5):
                inst = Instance.from_rows(p, [(r, 7)])
                assert brute_force(inst, max_horizon=20).optimum == 7 * (r + p - 1)

    def test_cap_refusal(self):
        inst = Instance.from_rows(3, [(1, 1)] * 5)
        with pytest.raises(ValueError, match="cap"):
            brute_force(inst)

    def test_enumerate_all_and_min_preemptions(self, worked_example):
        result = brute_force(worked_example, enumerate_all=True)
        assert result.optimum == 182
        assert Schedule.of([1, 1, 3, 3, 4, 4, 2, 2]) in result.all_optima
        assert Schedule.of([1, 4, 4, 3, 3, 2, 2, 1]) in result.all_optima
        assert result.min_preemptions == 0
        for s in result.all_optima:
            assert validate_schedule(worked_example, s) == []

    def test_idle_instance(self):
        inst = Instance.from_rows(1, [(1, 1), (5, 2)])
        result = brute_force(inst)
        assert result.schedule.slots == (1, IDLE, IDLE, IDLE, 2)
        assert result.optimum == 1 * 1 + 2 * 5

    def test_all_optima_satisfy_structure_properties(self, worked_example):
        """Optimal schedules never interleave two jobs mutually and keep
        multiples of p between consecutive parts of a job."""
        result = brute_force(worked_example, enumerate_all=True)
        p = worked_example.p
        for s in result.all_optima:
            spans = {}
            for t, jid in enumerate(s.slots, start=1):
                spans.setdefault(jid, []).append(t)
            for jid, ts in spans.items():
                for a, b in zip(ts, ts[1:]):
                    assert (b - a - 1) % p == 0
            for i, ti in spans.items():
                for j, tj in spans.items():
                    if i == j:
                        continue
                    i_inside_j = any(tj[0] < t < tj[-1] for t in ti)
                    j_inside_i = any(ti[0] < t < ti[-1] for t in tj)
                    assert not (i_inside_j and j_inside_i)


class TestMemoAgreesWithPlain:
    @pytest.mark.parametrize("seed", range(60))
    def test_random_small(self, seed):
        inst = random_small_instance(np.random.default_rng(seed))
        plain = brute_force(inst, max_horizon=40)
        memo = brute_force_memo(inst, max_horizon=40)
        assert memo.optimum == plain.optimum
        from eqsched.instance import objective_twct

        assert objective_twct(inst, memo.schedule) == memo.optimum
        assert validate_schedule(inst, memo.schedule) == []


class TestEnumerateFeasible:
    def test_single_job(self):
        assert enumerate_feasible(Instance.from_rows(3, [(1, 1)])) == 1

    def test_two_unit_jobs(self):
        assert enumerate_feasible(Instance.from_rows(1, [(1, 1), (1, 1)])) == 2

    @staticmethod
    def _boolean_solutions(model):
        from itertools import product

        out = []
        for bits in product((0, 1), repeat=model.nvars):
            ok = True
            for row in model.rows:
                total = sum(c * bits[i] for i, c in zip(row.cols, row.coefs))
                if (row.is_equality and total != row.rhs) or (not row.is_equality and total < row.rhs):
                    ok = False
                    break
            if ok:
                out.append(bits)
        return out

    def test_boolean_solutions_are_the_structured_schedules(self):
        """0/1 solutions of the rows are exactly the schedules whose
        consecutive parts of a job sit a multiple of p intervals apart.

        Schedules where two jobs mutually interleave are feasible but never
        optimal, and the ordering rows exclude them by design: here 6 valid
        schedules but only 4 structured ones.
        """
        from eqsched.instance import objective_twct
        from eqsched.model import build_model, build_weights

        inst = Instance.from_rows(2, [(1, 1), (1, 2)])
        model = build_model(build_weights(inst))
        sols = self._boolean_solutions(model)
        assert enumerate_feasible(inst) == 6
        assert len(sols) == 4

        schedules = []
        for bits in sols:
            slots = [IDLE] * inst.horizon
            for i, v in enumerate(bits):
                if v:
                    j, k, t = model.variables[i]
                    assert slots[t - 1] == IDLE
                    slots[t - 1] = j
            s = Schedule.of(slots)
            assert validate_schedule(inst, s) == []
            positions = {}
            for t, jid in enumerate(s.slots, start=1):
                positions.setdefault(jid, []).append(t)
            for ts in positions.values():
                assert all((b - a - 1) % inst.p == 0 for a, b in zip(ts, ts[1:]))
            schedules.append(s)
        assert len(set(schedules)) == 4
        # the excluded schedules are never optimal: the optima coincide
        assert min(objective_twct(inst, s) for s in schedules) == brute_force(inst).optimum

    def test_released_spread(self):
        # slots 1,2 forced to job 1; the remaining third unit interleaves
        assert enumerate_feasible(Instance.from_rows(3, [(1, 1), (3, 3)])) == 4
