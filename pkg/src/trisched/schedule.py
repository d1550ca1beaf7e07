"""Mappings, schedule evaluation, critical paths, super-weights, slack reclamation.

A schedule is a value object: a mapping (ordered task list per processor)
plus one execution plan per task. Evaluation derives start/finish times
under worst-case accounting (both executions of a re-executed task always
counted), total energy, per-task reliability slack and a feasibility verdict.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .graph import TaskGraph, bottom_levels
from .model import (
    SLACK_TOL,
    ExecutionPlan,
    PlatformModel,
    energy,
    exe_time,
    f_inf,
    reliability,
    reliability_threshold,
)


@dataclass(frozen=True)
class Mapping:
    """Ordered task list per processor; together a partition of the tasks."""

    proc_lists: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        seen = set()
        for lst in self.proc_lists:
            for tid in lst:
                if tid in seen:
                    raise ValueError(f"task {tid} mapped more than once")
                seen.add(tid)

    @property
    def proc_count(self) -> int:
        return len(self.proc_lists)

    def processor_of(self) -> dict[int, int]:
        return {tid: p for p, lst in enumerate(self.proc_lists) for tid in lst}

    def all_tasks(self) -> set[int]:
        return {tid for lst in self.proc_lists for tid in lst}


@dataclass(frozen=True)
class Schedule:
    mapping: Mapping
    plans: dict[int, ExecutionPlan]

    def with_plan(self, tid: int, plan: ExecutionPlan) -> "Schedule":
        plans = dict(self.plans)
        plans[tid] = plan
        return Schedule(self.mapping, plans)

    def with_plans(self, updates: dict[int, ExecutionPlan]) -> "Schedule":
        plans = dict(self.plans)
        plans.update(updates)
        return Schedule(self.mapping, plans)


@dataclass(frozen=True)
class ScheduleMetrics:
    makespan: float
    energy: float
    start_times: dict[int, float]
    finish_times: dict[int, float]
    reliability_slack: dict[int, float]
    feasible: bool
    deadline: float


def list_schedule(g: TaskGraph, p: int) -> Mapping:
    """Critical-path list scheduling at unit speed f_max.

    Repeatedly dispatches the ready task with the largest bottom-level
    (ties: smaller id) to the earliest-available processor (ties: smaller
    processor id).
    """
    if p < 1:
        raise ValueError("need at least one processor")
    bl = bottom_levels(g)
    n = len(g)
    indeg = {t.id: len(g.predecessors(t.id)) for t in g.tasks}
    pred_finish = {t.id: 0.0 for t in g.tasks}
    ready = [tid for tid, d in indeg.items() if d == 0]
    avail = [0.0] * p
    lists: list[list[int]] = [[] for _ in range(p)]
    finish: dict[int, float] = {}
    for _ in range(n):
        tid = max(ready, key=lambda t: (bl[t], -t))
        ready.remove(tid)
        proc = min(range(p), key=lambda q: (avail[q], q))
        start = max(avail[proc], pred_finish[tid])
        finish[tid] = start + g.weight(tid)  # unit speed: duration = weight
        avail[proc] = finish[tid]
        lists[proc].append(tid)
        for s in g.successors(tid):
            indeg[s] -= 1
            pred_finish[s] = max(pred_finish[s], finish[tid])
            if indeg[s] == 0:
                ready.append(s)
    return Mapping(tuple(tuple(lst) for lst in lists))


def uniform_schedule(g: TaskGraph, mapping: Mapping, speed: float) -> Schedule:
    return Schedule(mapping, {t.id: ExecutionPlan(speed) for t in g.tasks})


def _augmented_adjacency(g: TaskGraph, mapping: Mapping):
    """Precedence edges plus processor-order edges (consecutive per list)."""
    succs = {t.id: set(g.successors(t.id)) for t in g.tasks}
    preds = {t.id: set(g.predecessors(t.id)) for t in g.tasks}
    for lst in mapping.proc_lists:
        for a, b in zip(lst, lst[1:]):
            succs[a].add(b)
            preds[b].add(a)
    return succs, preds


def _augmented_topo(g: TaskGraph, mapping: Mapping) -> list[int]:
    succs, preds = _augmented_adjacency(g, mapping)
    indeg = {tid: len(ps) for tid, ps in preds.items()}
    stack = sorted((tid for tid, d in indeg.items() if d == 0), reverse=True)
    order = []
    while stack:
        u = stack.pop()
        order.append(u)
        for v in sorted(succs[u], reverse=True):
            indeg[v] -= 1
            if indeg[v] == 0:
                stack.append(v)
    if len(order) != len(indeg):
        raise ValueError("mapping order conflicts with task precedence (cycle)")
    return order


def evaluate(g: TaskGraph, schedule: Schedule, D: float, platform: PlatformModel) -> ScheduleMetrics:
    """Forward pass over precedence plus processor-order constraints."""
    succs, preds = _augmented_adjacency(g, schedule.mapping)
    order = _augmented_topo(g, schedule.mapping)
    start: dict[int, float] = {}
    finish: dict[int, float] = {}
    total_energy = 0.0
    for tid in order:
        w = g.weight(tid)
        plan = schedule.plans[tid]
        s = max((finish[p] for p in preds[tid]), default=0.0)
        start[tid] = s
        finish[tid] = s + exe_time(w, plan)
        total_energy += energy(w, plan)
    makespan = max(finish.values(), default=0.0)
    slack = {}
    for t in g.tasks:
        slack[t.id] = reliability(t.weight, schedule.plans[t.id], platform) - reliability_threshold(
            t.weight, platform
        )
    feasible = makespan <= D + SLACK_TOL and all(v >= -SLACK_TOL for v in slack.values())
    return ScheduleMetrics(makespan, total_energy, start, finish, slack, feasible, D)


def critical_path_tasks(g: TaskGraph, schedule: Schedule, metrics: ScheduleMetrics) -> list[int]:
    """Tasks on some longest path of the augmented DAG under current durations."""
    succs, _ = _augmented_adjacency(g, schedule.mapping)
    order = _augmented_topo(g, schedule.mapping)
    dur = {t.id: exe_time(t.weight, schedule.plans[t.id]) for t in g.tasks}
    bot: dict[int, float] = {}
    for tid in reversed(order):
        bot[tid] = dur[tid] + max((bot[s] for s in succs[tid]), default=0.0)
    return [tid for tid in order if metrics.start_times[tid] + bot[tid] >= metrics.makespan - SLACK_TOL]


def super_weight(g: TaskGraph, metrics: ScheduleMetrics, tid: int) -> float:
    """Sum of weights of tasks whose execution interval nests inside tid's.

    This measures the work that can be slowed down together with the task —
    i.e. the slack reclaimable around it.
    """
    s, f = metrics.start_times[tid], metrics.finish_times[tid]
    total = 0.0
    for t in g.tasks:
        if metrics.start_times[t.id] >= s - SLACK_TOL and metrics.finish_times[t.id] <= f + SLACK_TOL:
            total += t.weight
    return total


def sus_sort(g: TaskGraph, metrics: ScheduleMetrics, task_ids) -> list[int]:
    """Sort by decreasing super-weight; ties by decreasing weight, then id."""
    sw = {tid: super_weight(g, metrics, tid) for tid in task_ids}
    return sorted(task_ids, key=lambda tid: (-sw[tid], -g.weight(tid), tid))


def cohort_of(g: TaskGraph, metrics: ScheduleMetrics, tid: int) -> list[int]:
    """Tasks counted in tid's super-weight, excluding tid itself."""
    s, f = metrics.start_times[tid], metrics.finish_times[tid]
    return [
        t.id
        for t in g.tasks
        if t.id != tid
        and metrics.start_times[t.id] >= s - SLACK_TOL
        and metrics.finish_times[t.id] <= f + SLACK_TOL
    ]


def _est_lft(g, succs, preds, order, dur, D):
    est = {}
    for tid in order:
        est[tid] = max((est[p] + dur[p] for p in preds[tid]), default=0.0)
    lft = {}
    for tid in reversed(order):
        lft[tid] = min((lft[s] - dur[s] for s in succs[tid]), default=D)
    return est, lft


def slack_reclaim(
    g: TaskGraph,
    schedule: Schedule,
    D: float,
    platform: PlatformModel,
    targets,
    lower_bounds: dict[int, float],
) -> Schedule:
    """Slow the target tasks toward their lower bounds without losing feasibility.

    Repeated passes in reverse topological order: each target may expand into
    the window between its earliest start (forward pass) and latest allowed
    finish (backward pass from D), with the window recomputed after every
    accepted change. Speeds never increase, so energy never increases.
    Stops when a full pass changes nothing.
    """
    targets = set(targets)
    succs, preds = _augmented_adjacency(g, schedule.mapping)
    order = _augmented_topo(g, schedule.mapping)
    plans = dict(schedule.plans)
    weights = {t.id: t.weight for t in g.tasks}
    dur = {tid: exe_time(weights[tid], plans[tid]) for tid in order}
    est, lft = _est_lft(g, succs, preds, order, dur, D)
    for _ in range(len(order) + 2):
        changed = False
        for tid in reversed(order):
            if tid not in targets:
                continue
            window = lft[tid] - est[tid]
            if window <= 0.0:
                continue
            plan = plans[tid]
            w = weights[tid]
            if plan.re_executed:
                needed = 2.0 * w / window
            else:
                needed = w / window
            new_speed = max(lower_bounds.get(tid, platform.f_rel), needed)
            if new_speed < plan.speed1 - SLACK_TOL:
                plans[tid] = (
                    ExecutionPlan(new_speed, new_speed) if plan.re_executed else ExecutionPlan(new_speed)
                )
                dur[tid] = exe_time(w, plans[tid])
                est, lft = _est_lft(g, succs, preds, order, dur, D)
                changed = True
        if not changed:
            break
    return Schedule(schedule.mapping, plans)


def format_schedule(g: TaskGraph, schedule: Schedule) -> str:
    """Per task one line: id proc order speed1 [speed2]."""
    lines = []
    for proc, lst in enumerate(schedule.mapping.proc_lists):
        for k, tid in enumerate(lst):
            plan = schedule.plans[tid]
            parts = [str(tid), str(proc), str(k), repr(plan.speed1)]
            if plan.speed2 is not None:
                parts.append(repr(plan.speed2))
            lines.append(" ".join(parts))
    lines.sort(key=lambda ln: int(ln.split()[0]))
    return "\n".join(lines) + "\n"
