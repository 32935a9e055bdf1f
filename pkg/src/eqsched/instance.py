"""Problem data model: jobs, instances, schedules and the random instance generator.

Conventions used throughout the package:

* time is divided into unit intervals; interval ``t`` covers ``(t-1, t]``
  and is indexed from 1,
* job ``j`` may be processed in interval ``t`` iff ``t >= r_j``,
* a schedule assigns one job (or the idle marker) to every interval; each
  job occupies exactly ``p`` intervals.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

import numpy as np

#: Slot marker for an idle unit interval.
IDLE = 0

#: Weights are drawn uniformly from [1, WEIGHT_MAX] by the generator.
WEIGHT_MAX = 30


@dataclass(frozen=True)
class Job:
    """One job: 1-based id, integer release date and priority weight."""

    id: int
    release: int
    weight: int


@dataclass(frozen=True)
class Instance:
    """A set of ``n`` jobs sharing the common processing time ``p``."""

    jobs: tuple[Job, ...]
    p: int

    @property
    def n(self) -> int:
        return len(self.jobs)

    @property
    def horizon(self) -> int:
        """Number of unit intervals needed by a gap-free schedule (``n * p``)."""
        return len(self.jobs) * self.p

    def releases(self) -> tuple[int, ...]:
        return tuple(job.release for job in self.jobs)

    def weights(self) -> tuple[int, ...]:
        return tuple(job.weight for job in self.jobs)

    def job(self, job_id: int) -> Job:
        return self.jobs[job_id - 1]

    @classmethod
    def from_rows(cls, p: int, rows: Iterable[tuple[int, int]]) -> "Instance":
        """Build an instance from ``(release, weight)`` pairs; ids follow row order."""
        jobs = tuple(Job(i + 1, r, w) for i, (r, w) in enumerate(rows))
        return cls(jobs=jobs, p=p)


@dataclass(frozen=True)
class Schedule:
    """Assignment of jobs to unit intervals; ``slots[t-1]`` is interval ``t``."""

    slots: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.slots)

    @classmethod
    def of(cls, slots: Sequence[int]) -> "Schedule":
        return cls(slots=tuple(slots))


class Block(NamedTuple):
    """One idle-free piece of a decomposed instance.

    ``instance`` has releases shifted so its busy period starts at interval 1;
    interval ``t`` of the block corresponds to interval ``offset + t`` of the
    original instance.  ``job_ids[k]`` is the original id of the block's job
    ``k + 1``.
    """

    offset: int
    instance: Instance
    job_ids: tuple[int, ...]


def validate_instance(inst: Instance) -> list[str]:
    """Return all violated instance invariants; an empty list means valid."""
    problems = []
    if inst.n < 1:
        problems.append("instance must contain at least one job")
    if not isinstance(inst.p, int) or inst.p < 1:
        problems.append(f"processing time must be an integer >= 1, got {inst.p!r}")
    for pos, job in enumerate(inst.jobs, start=1):
        if job.id != pos:
            problems.append(f"job at position {pos} has id {job.id}; ids must be 1..n in order")
        if not isinstance(job.release, int) or job.release < 1:
            problems.append(f"job {job.id}: release must be an integer >= 1, got {job.release!r}")
        if not isinstance(job.weight, int) or job.weight < 1:
            problems.append(f"job {job.id}: weight must be an integer >= 1, got {job.weight!r}")
    return problems


def _check_valid(inst: Instance) -> None:
    problems = validate_instance(inst)
    if problems:
        raise ValueError("invalid instance: " + "; ".join(problems))


def expected_length(inst: Instance) -> int:
    """Length of a gap-free schedule: ``n * p`` plus any forced idle intervals."""
    blocks = decompose_idle(inst)
    last = blocks[-1]
    return last.offset + last.instance.horizon


def validate_schedule(inst: Instance, schedule: Schedule) -> list[str]:
    """Return all violated schedule invariants; an empty list means valid.

    A wrong slot count is a usage error and raises ``ValueError``; everything
    else (multiplicities, release dates, stray idle markers) is reported as
    data.
    """
    want = expected_length(inst)
    if len(schedule) != want:
        raise ValueError(f"schedule has {len(schedule)} slots, expected {want}")

    problems = []
    counts = {job.id: 0 for job in inst.jobs}
    for t, jid in enumerate(schedule.slots, start=1):
        if jid == IDLE:
            continue
        if jid not in counts:
            problems.append(f"interval {t}: unknown job id {jid}")
            continue
        counts[jid] += 1
        if t < inst.job(jid).release:
            problems.append(f"interval {t}: job {jid} released only at {inst.job(jid).release}")
    for jid, cnt in counts.items():
        if cnt != inst.p:
            problems.append(f"job {jid} occupies {cnt} intervals, expected {inst.p}")
    if not requires_idle(inst) and any(s == IDLE for s in schedule.slots):
        problems.append("schedule contains idle intervals but the instance needs none")
    return problems


def completion_times(schedule: Schedule) -> dict[int, int]:
    """Map each job id to its completion time (last interval holding the job)."""
    done = {}
    for t, jid in enumerate(schedule.slots, start=1):
        if jid != IDLE:
            done[jid] = t
    return done


def objective_twct(inst: Instance, schedule: Schedule) -> int:
    """Total weighted completion time of a valid schedule."""
    finished = completion_times(schedule)
    total = 0
    for job in inst.jobs:
        if job.id not in finished:
            raise ValueError(f"job {job.id} does not appear in the schedule")
        total += job.weight * finished[job.id]
    return total


def count_preemptions(schedule: Schedule) -> int:
    """Number of run breaks: per job, maximal contiguous runs minus one, summed."""
    runs: dict[int, int] = {}
    prev = IDLE
    for jid in schedule.slots:
        if jid != IDLE and jid != prev:
            runs[jid] = runs.get(jid, 0) + 1
        prev = jid
    return sum(r - 1 for r in runs.values())


def requires_idle(inst: Instance) -> bool:
    """True iff a schedule over intervals 1..n*p must leave some interval idle.

    Sweeping t = 1..T with greedy processing, the machine is busy at t exactly
    when the total work released by t exceeds the t-1 intervals already spent,
    regardless of which released job is picked.  A leading gap (no job released
    at interval 1) counts as idle time.
    """
    _check_valid(inst)
    releases = sorted(job.release for job in inst.jobs)
    work = 0
    pos = 0
    for t in range(1, inst.horizon + 1):
        while pos < inst.n and releases[pos] <= t:
            work += inst.p
            pos += 1
        if work < t:
            return True
    return False


def decompose_idle(inst: Instance) -> list[Block]:
    """Split an instance at forced idle intervals into idle-free blocks.

    Concatenating optimal block schedules at their offsets yields an optimal
    schedule of the original instance: jobs of later blocks are not released
    before the earlier blocks finish, so the subproblems are independent.
    Returns a single block (offset 0) when no idle time is forced.
    """
    _check_valid(inst)
    by_release = sorted(inst.jobs, key=lambda job: (job.release, job.id))
    blocks = []
    i = 0
    while i < len(by_release):
        start = by_release[i].release
        end = start - 1
        members = []
        while i < len(by_release) and by_release[i].release <= end + 1:
            members.append(by_release[i])
            end += inst.p
            i += 1
        members.sort(key=lambda job: job.id)
        offset = start - 1
        shifted = Instance.from_rows(inst.p, [(job.release - offset, job.weight) for job in members])
        blocks.append(Block(offset, shifted, tuple(job.id for job in members)))
    return blocks


def assemble_schedule(inst: Instance, blocks: list[Block], parts: list[Schedule]) -> Schedule:
    """Recombine block schedules into a full schedule with idle gaps restored."""
    last = blocks[-1]
    slots = [IDLE] * (last.offset + last.instance.horizon)
    for block, part in zip(blocks, parts):
        for t, jid in enumerate(part.slots):
            if jid != IDLE:
                slots[block.offset + t] = block.job_ids[jid - 1]
    return Schedule.of(slots)


def generate_instance(n: int, p: int, seed: int) -> Instance:
    """Draw a random idle-free instance, deterministically for a given seed.

    Releases are i.i.d. uniform on the integers [1, p*(n-6)] so that jobs keep
    arriving throughout the horizon; weights are uniform on [1, 30].  Draws
    requiring idle time are discarded and the whole instance is resampled.
    Uses numpy's seeded PCG64 generator, so instances are reproducible across
    platforms.
    """
    if n < 7:
        raise ValueError(f"generator needs n >= 7 (release range is [1, p*(n-6)]), got n={n}")
    if p < 1:
        raise ValueError(f"processing time must be >= 1, got p={p}")
    rng = np.random.default_rng(seed)
    r_max = p * (n - 6)
    while True:
        releases = rng.integers(1, r_max, size=n, endpoint=True)
        weights = rng.integers(1, WEIGHT_MAX, size=n, endpoint=True)
        inst = Instance.from_rows(p, [(int(r), int(w)) for r, w in zip(releases, weights)])
        if not requires_idle(inst):
            return inst


# ---------------------------------------------------------------------------
# Text formats.
#
# Instance files:   line 1 "n p", then n lines "r_j w_j" (job id = line order).
# Schedule files:   one line of whitespace-separated job ids, "-" for idle.
# ---------------------------------------------------------------------------


class ParseError(ValueError):
    """Malformed instance or schedule text; carries a 1-based line number."""

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


def _parse_int(token: str, line: int, what: str) -> int:
    try:
        return int(token, 10)
    except ValueError:
        raise ParseError(line, f"{what}: expected an integer, got {token!r}") from None


def parse_instance(text: str) -> Instance:
    lines = text.splitlines()
    if not lines or not lines[0].split():
        raise ParseError(1, "missing header 'n p'")
    header = lines[0].split()
    if len(header) != 2:
        raise ParseError(1, f"header must be 'n p', got {lines[0]!r}")
    n = _parse_int(header[0], 1, "n")
    p = _parse_int(header[1], 1, "p")
    if n < 1:
        raise ParseError(1, f"n must be >= 1, got {n}")
    rows = []
    for k in range(n):
        lineno = k + 2
        if lineno > len(lines):
            raise ParseError(lineno, f"expected {n} job lines, file ends after {k}")
        fields = lines[lineno - 1].split()
        if len(fields) != 2:
            raise ParseError(lineno, f"job line must be 'r w', got {lines[lineno - 1]!r}")
        rows.append((_parse_int(fields[0], lineno, "release"), _parse_int(fields[1], lineno, "weight")))
    for extra in range(n + 1, len(lines)):
        if lines[extra].split():
            raise ParseError(extra + 1, f"trailing garbage: {lines[extra]!r}")
    return Instance.from_rows(p, rows)


def format_instance(inst: Instance) -> str:
    lines = [f"{inst.n} {inst.p}"]
    lines.extend(f"{job.release} {job.weight}" for job in inst.jobs)
    return "\n".join(lines) + "\n"


def parse_schedule(text: str) -> Schedule:
    lines = text.splitlines()
    body = [i for i, line in enumerate(lines) if line.split()]
    if not body:
        raise ParseError(1, "empty schedule")
    if len(body) > 1:
        raise ParseError(body[1] + 1, f"trailing garbage: {lines[body[1]]!r}")
    lineno = body[0] + 1
    slots = []
    for token in lines[body[0]].split():
        if token == "-":
            slots.append(IDLE)
        else:
            value = _parse_int(token, lineno, "slot")
            if value < 1:
                raise ParseError(lineno, f"job ids must be >= 1, got {value}")
            slots.append(value)
    return Schedule.of(slots)


def format_schedule(schedule: Schedule) -> str:
    return " ".join("-" if s == IDLE else str(s) for s in schedule.slots) + "\n"
