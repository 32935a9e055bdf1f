import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from eqsched.instance import (
    IDLE,
    Instance,
    Job,
    ParseError,
    Schedule,
    assemble_schedule,
    completion_times,
    count_preemptions,
    decompose_idle,
    expected_length,
    format_instance,
    format_schedule,
    generate_instance,
    objective_twct,
    parse_instance,
    parse_schedule,
    requires_idle,
    validate_instance,
    validate_schedule,
)


class TestValidateInstance:
    def test_two_job_example_is_valid(self, two_job_example):
        assert validate_instance(two_job_example) == []

    def test_release_below_one(self):
        inst = Instance.from_rows(1, [(0, 1)])
        problems = validate_instance(inst)
        assert len(problems) == 1 and "release" in problems[0]

    def test_two_violations(self):
        inst = Instance.from_rows(2, [(1, 1), (-1, 0)])
        problems = validate_instance(inst)
        assert len(problems) == 2

    def test_bad_ids(self):
        inst = Instance(jobs=(Job(2, 1, 1),), p=1)
        assert any("id" in msg for msg in validate_instance(inst))


class TestSchedules:
    def test_worked_example_schedule_valid(self, worked_example):
        s = Schedule.of([1, 1, 3, 3, 4, 4, 2, 2])
        assert validate_schedule(worked_example, s) == []

    def test_release_violation(self, worked_example):
        s = Schedule.of([2, 2, 3, 3, 4, 4, 1, 1])
        problems = validate_schedule(worked_example, s)
        assert any("job 2" in m and "released" in m for m in problems)

    def test_multiplicity_violation(self, worked_example):
        s = Schedule.of([1, 1, 1, 3, 3, 4, 4, 2])
        problems = validate_schedule(worked_example, s)
        assert any("job 1 occupies 3" in m for m in problems)
        assert any("job 2 occupies 1" in m for m in problems)

    def test_length_mismatch_is_hard_error(self, worked_example):
        with pytest.raises(ValueError, match="slots"):
            validate_schedule(worked_example, Schedule.of([1, 1]))

    def test_idle_marker_rejected_when_unneeded(self, worked_example):
        s = Schedule.of([1, 1, 3, 3, 4, 4, 2, IDLE])
        problems = validate_schedule(worked_example, s)
        assert any("idle" in m for m in problems)

    def test_completion_times(self):
        assert completion_times(Schedule.of([1, 1, 3, 3, 4, 4, 2, 2])) == {1: 2, 3: 4, 4: 6, 2: 8}
        assert completion_times(Schedule.of([1, 4, 3, 3, 4, 2, 2, 1])) == {1: 8, 4: 5, 3: 4, 2: 7}
        assert completion_times(Schedule.of([1, 1])) == {1: 2}

    def test_objective_values(self, worked_example):
        assert objective_twct(worked_example, Schedule.of([1, 1, 3, 3, 4, 4, 2, 2])) == 182
        assert objective_twct(worked_example, Schedule.of([1, 4, 3, 3, 4, 2, 2, 1])) == 188
        assert objective_twct(worked_example, Schedule.of([1, 4, 4, 3, 3, 2, 2, 1])) == 182

    def test_count_preemptions(self):
        assert count_preemptions(Schedule.of([1, 1, 3, 3, 4, 4, 2, 2])) == 0
        assert count_preemptions(Schedule.of([1, 4, 3, 3, 4, 2, 2, 1])) == 2
        assert count_preemptions(Schedule.of([1, 4, 4, 3, 3, 2, 2, 1])) == 1

    def test_preemption_across_idle_counts(self):
        assert count_preemptions(Schedule.of([1, IDLE, 1])) == 1


class TestRequiresIdle:
    def test_worked_example(self, worked_example):
        assert requires_idle(worked_example) is False

    def test_gap_forces_idle(self):
        assert requires_idle(Instance.from_rows(1, [(1, 1), (5, 1)])) is True

    def test_single_contiguous_job(self):
        assert requires_idle(Instance.from_rows(3, [(1, 1)])) is False

    def test_leading_gap_counts(self):
        # no job can run in interval 1, so idle time is unavoidable
        assert requires_idle(Instance.from_rows(2, [(2, 1)])) is True


class TestDecompose:
    def test_no_idle_single_block(self, worked_example):
        blocks = decompose_idle(worked_example)
        assert len(blocks) == 1
        assert blocks[0].offset == 0
        assert blocks[0].instance == worked_example
        assert blocks[0].job_ids == (1, 2, 3, 4)

    def test_forced_split(self):
        blocks = decompose_idle(Instance.from_rows(1, [(1, 1), (5, 2)]))
        assert [(b.offset, b.job_ids) for b in blocks] == [(0, (1,)), (4, (2,))]
        assert blocks[1].instance.releases() == (1,)

    def test_three_jobs_two_blocks(self):
        # derived by the busy-period sweep: jobs 1,2 fill intervals 1..4,
        # job 3 (released at 9) starts after a forced gap at 5..8
        blocks = decompose_idle(Instance.from_rows(2, [(1, 1), (1, 2), (9, 3)]))
        assert [(b.offset, b.job_ids) for b in blocks] == [(0, (1, 2)), (8, (3,))]

    def test_leading_gap_shifts_block(self):
        blocks = decompose_idle(Instance.from_rows(2, [(3, 5)]))
        assert blocks[0].offset == 2
        assert blocks[0].instance.releases() == (1,)

    def test_roundtrip_preserves_jobs(self):
        inst = Instance.from_rows(2, [(9, 1), (1, 2), (9, 3), (2, 4)])
        blocks = decompose_idle(inst)
        rebuilt = sorted(
            (orig, sub.release + block.offset, sub.weight)
            for block in blocks
            for orig, sub in zip(block.job_ids, block.instance.jobs)
        )
        original = sorted((job.id, job.release, job.weight) for job in inst.jobs)
        assert rebuilt == original

    def test_assemble_marks_gaps_idle(self):
        inst = Instance.from_rows(1, [(1, 1), (5, 2)])
        blocks = decompose_idle(inst)
        full = assemble_schedule(inst, blocks, [Schedule.of([1]), Schedule.of([1])])
        assert full.slots == (1, IDLE, IDLE, IDLE, 2)
        assert validate_schedule(inst, full) == []
        assert expected_length(inst) == 5


class TestGenerator:
    def test_ranges_and_no_idle(self):
        for seed in range(20):
            inst = generate_instance(10, 2, seed)
            assert validate_instance(inst) == []
            assert not requires_idle(inst)
            assert all(1 <= r <= 8 for r in inst.releases())
            assert all(1 <= w <= 30 for w in inst.weights())

    def test_degenerate_release_range(self):
        inst = generate_instance(7, 1, 123)
        assert inst.releases() == (1,) * 7

    def test_deterministic(self):
        assert generate_instance(9, 3, 42) == generate_instance(9, 3, 42)

    def test_rejects_small_n(self):
        with pytest.raises(ValueError, match="n >= 7"):
            generate_instance(6, 2, 0)

    @given(st.integers(7, 12), st.integers(1, 3), st.integers(0, 10_000))
    @settings(max_examples=40, deadline=None)
    def test_generated_instances_always_valid(self, n, p, seed):
        inst = generate_instance(n, p, seed)
        assert validate_instance(inst) == []
        assert not requires_idle(inst)


class TestTextFormats:
    def test_instance_roundtrip(self, worked_example):
        assert parse_instance(format_instance(worked_example)) == worked_example

    def test_parse_instance_example(self):
        inst = parse_instance("2 3\n1 1\n3 3\n")
        assert inst.n == 2 and inst.p == 3
        assert inst.releases() == (1, 3)

    def test_instance_trailing_garbage(self):
        with pytest.raises(ParseError, match="line 4"):
            parse_instance("2 1\n1 1\n2 1\nbogus\n")

    def test_instance_short_file(self):
        with pytest.raises(ParseError, match="line 3"):
            parse_instance("2 1\n1 1\n")

    def test_instance_non_integer(self):
        with pytest.raises(ParseError, match="line 2"):
            parse_instance("1 1\n1.5 2\n")

    def test_schedule_roundtrip(self):
        s = Schedule.of([1, IDLE, 2, 2])
        assert parse_schedule(format_schedule(s)) == s
        assert format_schedule(s) == "1 - 2 2\n"

    def test_schedule_garbage(self):
        with pytest.raises(ParseError):
            parse_schedule("1 2 x\n")
        with pytest.raises(ParseError, match="line 2"):
            parse_schedule("1 2\n3\n")


@given(st.integers(0, 10_000))
@settings(max_examples=30, deadline=None)
def test_occupancy_invariant_on_generated(seed):
    """Every job appears exactly p times and slots sum to n*p."""
    inst = generate_instance(8, 2, seed)
    from eqsched.heuristics import wsrpt

    s = wsrpt(inst)
    assert len(s) == inst.horizon
    assert validate_schedule(inst, s) == []
    for job in inst.jobs:
        assert sum(1 for v in s.slots if v == job.id) == inst.p


@given(st.integers(0, 10_000))
@settings(max_examples=30, deadline=None)
def test_moving_non_final_part_earlier_keeps_objective(seed):
    """Objective only depends on last occurrences."""
    import numpy as np

    rng = np.random.default_rng(seed)
    from tests.conftest import random_small_instance

    inst = random_small_instance(rng)
    from eqsched.oracle import brute_force

    result = brute_force(inst, max_horizon=40)
    s = list(result.schedule.slots)
    finished = completion_times(result.schedule)
    base = objective_twct(inst, result.schedule)
    # swap two non-final slots of the same job when possible: objective unchanged
    for jid, last in finished.items():
        positions = [t for t, v in enumerate(s, start=1) if v == jid and t != last]
        for t in positions:
            for earlier in range(inst.job(jid).release, t):
                if s[earlier - 1] == IDLE:
                    swapped = list(s)
                    swapped[earlier - 1], swapped[t - 1] = jid, IDLE
                    assert objective_twct(inst, Schedule.of(swapped)) == base
