"""World and workload builders shared across the test modules.

All builders bypass CSV loading and assemble World objects directly, so
tests control every series value and link parameter exactly.
"""

from __future__ import annotations

import numpy as np

from geosched.config import DcBlueprint, NormScales, World
from geosched.core import EconomicsConfig, HourlySeries, Job, build_links


def series(values, label="") -> HourlySeries:
    return HourlySeries(0, np.asarray(values, dtype=np.float64), label)


def const_series(value, hours, label="") -> HourlySeries:
    return series([float(value)] * hours, label)


def job(jid, src, *, arr=0, gpus=1, dur=2, slack=1000,
        data=0.0, model=0.0) -> Job:
    return Job(
        id=jid, src_dc=src, data_gb=float(data), model_gb=float(model),
        arrival_min=arr, gpus=gpus, duration_min=dur, slack_min=slack,
    )


def make_world(
    *,
    r_max,
    prices,
    carbons,
    pues=None,
    horizon_min=120,
    jobs=(),
    econ=None,
    throughput_gb_per_min=2.0,
    cost_usd_per_gb=0.01,
    energy_kwh_per_gb=0.02,
    link_overrides=None,
    seed=0,
) -> World:
    """Assemble a World from literal per-DC series.

    prices/carbons entries may be scalars (held constant over enough hours
    to cover the horizon) or explicit per-hour lists.
    """
    n = len(r_max)
    hours = max(1, -(-horizon_min // 60))
    if pues is None:
        pues = [1.2] * n
    blueprints = []
    for i in range(n):
        p = prices[i]
        c = carbons[i]
        ps = const_series(p, hours, f"price{i}") if np.isscalar(p) else series(p, f"price{i}")
        cs = const_series(c, hours, f"carbon{i}") if np.isscalar(c) else series(c, f"carbon{i}")
        if ps.end_min < horizon_min or cs.end_min < horizon_min:
            raise ValueError("series shorter than horizon")
        blueprints.append(DcBlueprint(i, f"zone{i}", int(r_max[i]), float(pues[i]), ps, cs))
    links = build_links(
        n,
        throughput_gb_per_min=throughput_gb_per_min,
        cost_usd_per_gb=cost_usd_per_gb,
        energy_kwh_per_gb=energy_kwh_per_gb,
    )
    if link_overrides:
        links.update(link_overrides)
    if econ is None:
        econ = EconomicsConfig()
    jobs = list(jobs)
    scales = NormScales(
        gpus=float(max(r_max)),
        duration=float(max((j.duration_min for j in jobs), default=60)),
        price=float(max(float(np.max(bp.price_series.values)) for bp in blueprints)),
        carbon=float(max(float(np.max(bp.carbon_series.values)) for bp in blueprints)),
        time=float(horizon_min),
    )
    return World(
        blueprints=blueprints,
        links=links,
        econ=econ,
        horizon_min=horizon_min,
        workload_params=None,
        fixed_jobs=jobs,
        scales=scales,
        master_seed=seed,
    )


def synth_world(
    *,
    r_max,
    prices,
    carbons,
    pues,
    horizon_min,
    params,
    econ=None,
    throughput_gb_per_min=2.0,
    cost_usd_per_gb=0.01,
    energy_kwh_per_gb=0.02,
    seed=0,
) -> World:
    """World with a synthetic arrival process instead of fixed jobs."""
    n = len(r_max)
    hours = max(1, -(-horizon_min // 60))
    blueprints = []
    for i in range(n):
        blueprints.append(DcBlueprint(
            i, f"zone{i}", int(r_max[i]), float(pues[i]),
            const_series(prices[i], hours, f"price{i}"),
            const_series(carbons[i], hours, f"carbon{i}"),
        ))
    links = build_links(
        n,
        throughput_gb_per_min=throughput_gb_per_min,
        cost_usd_per_gb=cost_usd_per_gb,
        energy_kwh_per_gb=energy_kwh_per_gb,
    )
    scales = NormScales(
        gpus=float(max(r_max)),
        duration=float(max(jt.duration_min[1] for jt in params.job_types)),
        price=float(max(prices)),
        carbon=float(max(carbons)),
        time=float(horizon_min),
    )
    return World(
        blueprints=blueprints,
        links=links,
        econ=econ if econ is not None else EconomicsConfig(),
        horizon_min=horizon_min,
        workload_params=params,
        fixed_jobs=None,
        scales=scales,
        master_seed=seed,
    )


def random_scenario(rng: np.random.Generator):
    """A random mid-size world plus workload for oracle sweeps."""
    n = int(rng.integers(2, 6))
    horizon = int(rng.integers(2, 25)) * 60
    r_max = rng.integers(2, 9, size=n)
    pues = 1.0 + rng.uniform(0.05, 0.5, size=n)
    hours = horizon // 60
    prices = [
        np.round(rng.uniform(15.0, 400.0) * (1.0 + rng.uniform(-0.2, 0.2, hours)), 2)
        for _ in range(n)
    ]
    carbons = [
        np.round(rng.uniform(40.0, 700.0) * (1.0 + rng.uniform(-0.2, 0.2, hours)), 2)
        for _ in range(n)
    ]
    econ = EconomicsConfig(
        alpha_usd_per_gpu_hour=float(rng.uniform(0.02, 0.2)),
        carbon_price_usd_per_ton=float(rng.uniform(20.0, 300.0)),
        idle_power_ratio=float(rng.uniform(0.0, 0.3)),
        gpu_power_kw=float(rng.uniform(0.1, 0.7)),
    )
    n_jobs = int(rng.integers(5, 121))
    jobs = []
    for jid in range(n_jobs):
        dur = int(rng.integers(5, 180))
        jobs.append(job(
            jid,
            int(rng.integers(n)),
            arr=int(rng.integers(0, max(1, int(horizon * 0.8)))),
            gpus=int(rng.integers(1, 5)),
            dur=dur,
            slack=int(rng.uniform(0.1, 1.5) * dur),
            data=float(np.round(rng.uniform(0.0, 20.0), 3)),
            model=float(np.round(rng.uniform(0.0, 8.0), 3)),
        ))
    jobs.sort(key=lambda j: j.arrival_min)
    for new_id, j in enumerate(jobs):
        j.id = new_id
    world = make_world(
        r_max=list(r_max),
        prices=prices,
        carbons=carbons,
        pues=list(pues),
        horizon_min=horizon,
        jobs=jobs,
        econ=econ,
        throughput_gb_per_min=float(rng.uniform(0.5, 5.0)),
        cost_usd_per_gb=float(rng.uniform(0.001, 0.05)),
        energy_kwh_per_gb=float(rng.uniform(0.005, 0.05)),
    )
    return world


def tiny_instance(rng: np.random.Generator):
    """A 2-DC instance small enough for exhaustive schedule search."""
    horizon = int(rng.integers(4, 9))
    r_max = [int(rng.integers(1, 4)), int(rng.integers(1, 4))]
    prices = [float(rng.uniform(20, 350)), float(rng.uniform(20, 350))]
    carbons = [float(rng.uniform(50, 600)), float(rng.uniform(50, 600))]
    econ = EconomicsConfig(
        alpha_usd_per_gpu_hour=float(rng.uniform(0.02, 0.3)),
        carbon_price_usd_per_ton=float(rng.uniform(20, 300)),
        idle_power_ratio=float(rng.uniform(0.0, 0.2)),
        gpu_power_kw=float(rng.uniform(0.1, 0.5)),
    )
    n_jobs = int(rng.integers(1, 5))
    jobs = []
    for jid in range(n_jobs):
        dur = int(rng.integers(1, 4))
        jobs.append(job(
            jid,
            int(rng.integers(2)),
            arr=int(rng.integers(0, max(1, horizon - 2))),
            gpus=int(rng.integers(1, 3)),
            dur=dur,
            slack=int(rng.integers(0, 5)),
            data=float(np.round(rng.uniform(0.0, 3.0), 2)),
            model=float(np.round(rng.uniform(0.0, 2.0), 2)),
        ))
    jobs.sort(key=lambda j: j.arrival_min)
    for new_id, j in enumerate(jobs):
        j.id = new_id
    return make_world(
        r_max=r_max,
        prices=prices,
        carbons=carbons,
        pues=[float(rng.uniform(1.05, 1.4)), float(rng.uniform(1.05, 1.4))],
        horizon_min=horizon,
        jobs=jobs,
        econ=econ,
        throughput_gb_per_min=float(rng.choice([1.0, 2.5])),
        cost_usd_per_gb=float(rng.uniform(0.001, 0.02)),
        energy_kwh_per_gb=float(rng.uniform(0.005, 0.03)),
    )
