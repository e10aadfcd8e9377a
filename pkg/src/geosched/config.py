"""Scenario configuration: schema, defaults, JSON round-trip, world assembly.

A scenario is one JSON document. Unspecified fields fall back to the stock
five-region setup (GPU counts [100,110,80,130,120], PUEs [1.3,1.2,1.1,1.4,
1.2], arrival coefficients [0.01,0.02,0.01,0.025,0.03], gamma 0.99, batch
256, K_max 12000, 1000 updates/epoch, hidden [256,256], actor/critic
learning rates 1e-5/5e-4).
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .core import (
    ConfigError,
    DataCenter,
    EconomicsConfig,
    HourlySeries,
    Job,
    NetworkLink,
    build_links,
)
from .data import (
    DEFAULT_JOB_TYPES,
    DEFAULT_TEMPLATE,
    JobType,
    WorkloadParams,
    load_series,
    load_workload,
    synthesize_workload,
)

DEFAULT_ZONES = ("AUS-SA", "AUS-WA", "CA-ON", "PL", "SG")
DEFAULT_R_MAX = (100, 110, 80, 130, 120)
DEFAULT_PUE = (1.3, 1.2, 1.1, 1.4, 1.2)

# Seed stream domains; every rng in the system derives from
# (master_seed, domain, index) so no two consumers share a stream.
DOMAIN_WORKLOAD = 1
DOMAIN_AGENT = 2
DOMAIN_POLICY = 3
DOMAIN_EVAL = 4
DOMAIN_UPDATE = 5
# Workload index offsets: training envs use 0..n_envs-1.
VALIDATION_WORKLOAD_INDEX = 10_000
EVAL_WORKLOAD_INDEX = 20_000


def seed_sequence(master: int, domain: int, index: int = 0) -> np.random.SeedSequence:
    return np.random.SeedSequence((int(master), int(domain), int(index)))


def seed_int(master: int, domain: int, index: int = 0) -> int:
    return int(seed_sequence(master, domain, index).generate_state(1)[0])


def rng_for(master: int, domain: int, index: int = 0) -> np.random.Generator:
    return np.random.default_rng(seed_sequence(master, domain, index))


@dataclass
class DcSpec:
    """Declared properties of one region plus where its series live."""

    zone: str
    r_max: int
    pue: float
    price_csv: str
    carbon_csv: str


@dataclass
class LinkSettings:
    throughput_gb_per_min: float = 2.0
    cost_usd_per_gb: float = 0.01
    energy_kwh_per_gb: float = 0.02
    overrides: list = field(default_factory=list)  # dicts with from_dc/to_dc + coefficients


@dataclass
class WorkloadSettings:
    """Either a fixed workload CSV or synthesis parameters."""

    path: str | None = None
    delta: tuple = (0.01, 0.02, 0.01, 0.025, 0.03)
    template: tuple = DEFAULT_TEMPLATE
    mixture_weights: tuple = ()
    slack_ratio_mean: float = 0.4
    job_types: tuple = DEFAULT_JOB_TYPES

    def params(self) -> WorkloadParams:
        return WorkloadParams(
            delta=self.delta,
            template=self.template,
            job_types=self.job_types,
            mixture_weights=self.mixture_weights,
            slack_ratio_mean=self.slack_ratio_mean,
        )


@dataclass
class TrainingSettings:
    epochs: int = 100
    k_max: int = 12000
    updates_per_epoch: int = 1000
    batch_size: int = 256
    gamma: float = 0.99
    actor_lr: float = 1e-5
    critic_lr: float = 5e-4
    hidden_sizes: tuple = (256, 256)
    tau: float = 0.005
    init_temperature: float = 0.2
    target_entropy_scale: float = 0.6
    auto_temperature: bool = True
    buffer_capacity: int = 200_000
    n_envs: int = 10
    eval_envs: int = 10
    reward_scale: float = 1.0
    epsilon_start: float = 1.0
    epsilon_end: float = 0.05


@dataclass
class ScenarioConfig:
    name: str = "default_5dc"
    horizon_min: int = 2880
    seed: int = 0
    dcs: list = field(default_factory=list)
    links: LinkSettings = field(default_factory=LinkSettings)
    economics: EconomicsConfig = field(default_factory=EconomicsConfig)
    workload: WorkloadSettings = field(default_factory=WorkloadSettings)
    training: TrainingSettings = field(default_factory=TrainingSettings)

    @property
    def n_dcs(self) -> int:
        return len(self.dcs)

    def validate(self) -> None:
        if not self.name:
            raise ConfigError("scenario name must be non-empty")
        if self.n_dcs < 2:
            raise ConfigError("at least 2 data centers required")
        if self.horizon_min < 60:
            raise ConfigError("horizon_min must be >= 60")
        for i, dc in enumerate(self.dcs):
            if dc.r_max < 1:
                raise ConfigError(f"dc {i}: r_max must be >= 1")
            if not dc.pue > 1.0:
                raise ConfigError(f"dc {i}: pue must be > 1")
            if not dc.price_csv or not dc.carbon_csv:
                raise ConfigError(f"dc {i}: missing series path")
        if self.workload.path is None and len(self.workload.delta) < self.n_dcs:
            raise ConfigError(
                f"workload.delta needs {self.n_dcs} coefficients, "
                f"got {len(self.workload.delta)}"
            )
        tr = self.training
        if min(tr.epochs, tr.k_max, tr.updates_per_epoch, tr.batch_size) < 1:
            raise ConfigError("training counts must be >= 1")
        if not 0.0 <= tr.gamma <= 1.0:
            raise ConfigError("gamma must be in [0, 1]")
        if min(tr.actor_lr, tr.critic_lr) <= 0:
            raise ConfigError("learning rates must be > 0")
        if not 0.0 < tr.tau <= 1.0:
            raise ConfigError("tau must be in (0, 1]")
        if tr.n_envs < 1 or tr.eval_envs < 1:
            raise ConfigError("environment counts must be >= 1")


# --- JSON round-trip ---

def config_to_dict(cfg: ScenarioConfig) -> dict:
    return {
        "name": cfg.name,
        "horizon_min": cfg.horizon_min,
        "seed": cfg.seed,
        "dcs": [
            {
                "zone": d.zone,
                "r_max": d.r_max,
                "pue": d.pue,
                "price_csv": d.price_csv,
                "carbon_csv": d.carbon_csv,
            }
            for d in cfg.dcs
        ],
        "links": {
            "throughput_gb_per_min": cfg.links.throughput_gb_per_min,
            "cost_usd_per_gb": cfg.links.cost_usd_per_gb,
            "energy_kwh_per_gb": cfg.links.energy_kwh_per_gb,
            "overrides": [dict(o) for o in cfg.links.overrides],
        },
        "economics": {
            "alpha_usd_per_gpu_hour": cfg.economics.alpha_usd_per_gpu_hour,
            "carbon_price_usd_per_ton": cfg.economics.carbon_price_usd_per_ton,
            "idle_power_ratio": cfg.economics.idle_power_ratio,
            "gpu_power_kw": cfg.economics.gpu_power_kw,
        },
        "workload": {
            "path": cfg.workload.path,
            "delta": list(cfg.workload.delta),
            "template": list(cfg.workload.template),
            "mixture_weights": list(cfg.workload.mixture_weights),
            "slack_ratio_mean": cfg.workload.slack_ratio_mean,
            "job_types": [
                {
                    "name": jt.name,
                    "gpus": list(jt.gpus),
                    "duration_min": list(jt.duration_min),
                    "data_gb": list(jt.data_gb),
                    "model_gb": list(jt.model_gb),
                }
                for jt in cfg.workload.job_types
            ],
        },
        "training": {
            "epochs": cfg.training.epochs,
            "k_max": cfg.training.k_max,
            "updates_per_epoch": cfg.training.updates_per_epoch,
            "batch_size": cfg.training.batch_size,
            "gamma": cfg.training.gamma,
            "actor_lr": cfg.training.actor_lr,
            "critic_lr": cfg.training.critic_lr,
            "hidden_sizes": list(cfg.training.hidden_sizes),
            "tau": cfg.training.tau,
            "init_temperature": cfg.training.init_temperature,
            "target_entropy_scale": cfg.training.target_entropy_scale,
            "auto_temperature": cfg.training.auto_temperature,
            "buffer_capacity": cfg.training.buffer_capacity,
            "n_envs": cfg.training.n_envs,
            "eval_envs": cfg.training.eval_envs,
            "reward_scale": cfg.training.reward_scale,
            "epsilon_start": cfg.training.epsilon_start,
            "epsilon_end": cfg.training.epsilon_end,
        },
    }


def config_from_dict(doc: dict) -> ScenarioConfig:
    cfg = ScenarioConfig()
    cfg.name = doc.get("name", cfg.name)
    cfg.horizon_min = int(doc.get("horizon_min", cfg.horizon_min))
    cfg.seed = int(doc.get("seed", cfg.seed))
    cfg.dcs = [
        DcSpec(
            zone=d["zone"],
            r_max=int(d["r_max"]),
            pue=float(d["pue"]),
            price_csv=d["price_csv"],
            carbon_csv=d["carbon_csv"],
        )
        for d in doc.get("dcs", [])
    ]
    if "links" in doc:
        ld = doc["links"]
        cfg.links = LinkSettings(
            throughput_gb_per_min=float(ld.get("throughput_gb_per_min", 2.0)),
            cost_usd_per_gb=float(ld.get("cost_usd_per_gb", 0.01)),
            energy_kwh_per_gb=float(ld.get("energy_kwh_per_gb", 0.02)),
            overrides=[dict(o) for o in ld.get("overrides", [])],
        )
    if "economics" in doc:
        ed = doc["economics"]
        cfg.economics = EconomicsConfig(
            alpha_usd_per_gpu_hour=float(ed.get("alpha_usd_per_gpu_hour", 0.05)),
            carbon_price_usd_per_ton=float(ed.get("carbon_price_usd_per_ton", 100.0)),
            idle_power_ratio=float(ed.get("idle_power_ratio", 0.1)),
            gpu_power_kw=float(ed.get("gpu_power_kw", 0.3)),
        )
    if "workload" in doc:
        wd = doc["workload"]
        job_types = tuple(
            JobType(
                name=j["name"],
                gpus=tuple(j["gpus"]),
                duration_min=tuple(j["duration_min"]),
                data_gb=tuple(j["data_gb"]),
                model_gb=tuple(j["model_gb"]),
            )
            for j in wd.get("job_types", [])
        ) or DEFAULT_JOB_TYPES
        cfg.workload = WorkloadSettings(
            path=wd.get("path"),
            delta=tuple(wd.get("delta", WorkloadSettings.delta)),
            template=tuple(wd.get("template", DEFAULT_TEMPLATE)),
            mixture_weights=tuple(wd.get("mixture_weights", ())),
            slack_ratio_mean=float(wd.get("slack_ratio_mean", 0.4)),
            job_types=job_types,
        )
    if "training" in doc:
        td = doc["training"]
        base = TrainingSettings()
        cfg.training = TrainingSettings(
            epochs=int(td.get("epochs", base.epochs)),
            k_max=int(td.get("k_max", base.k_max)),
            updates_per_epoch=int(td.get("updates_per_epoch", base.updates_per_epoch)),
            batch_size=int(td.get("batch_size", base.batch_size)),
            gamma=float(td.get("gamma", base.gamma)),
            actor_lr=float(td.get("actor_lr", base.actor_lr)),
            critic_lr=float(td.get("critic_lr", base.critic_lr)),
            hidden_sizes=tuple(td.get("hidden_sizes", base.hidden_sizes)),
            tau=float(td.get("tau", base.tau)),
            init_temperature=float(td.get("init_temperature", base.init_temperature)),
            target_entropy_scale=float(
                td.get("target_entropy_scale", base.target_entropy_scale)
            ),
            auto_temperature=bool(td.get("auto_temperature", base.auto_temperature)),
            buffer_capacity=int(td.get("buffer_capacity", base.buffer_capacity)),
            n_envs=int(td.get("n_envs", base.n_envs)),
            eval_envs=int(td.get("eval_envs", base.eval_envs)),
            reward_scale=float(td.get("reward_scale", base.reward_scale)),
            epsilon_start=float(td.get("epsilon_start", base.epsilon_start)),
            epsilon_end=float(td.get("epsilon_end", base.epsilon_end)),
        )
    return cfg


def canonical_json(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def load_config(path) -> ScenarioConfig:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON: {exc}") from None
    cfg = config_from_dict(doc)
    cfg.validate()
    return cfg


def save_config(cfg: ScenarioConfig, path) -> None:
    Path(path).write_text(canonical_json(config_to_dict(cfg)), encoding="utf-8")


def default_config(series_dir: str = "sample_data/synthetic") -> ScenarioConfig:
    """The stock five-region scenario over the shipped synthetic series.

    ``series_dir`` is interpreted relative to wherever the config file will
    live, since build_world resolves paths against the config's directory.
    """
    dcs = []
    for zone, r_max, pue in zip(DEFAULT_ZONES, DEFAULT_R_MAX, DEFAULT_PUE):
        slug = zone.lower().replace("-", "_")
        dcs.append(
            DcSpec(
                zone=zone,
                r_max=r_max,
                pue=pue,
                price_csv=f"{series_dir}/{slug}_price.csv",
                carbon_csv=f"{series_dir}/{slug}_carbon.csv",
            )
        )
    return ScenarioConfig(dcs=dcs)


# --- world assembly ---

@dataclass
class DcBlueprint:
    """Immutable region description used to stamp out fresh DataCenters."""

    id: int
    zone: str
    r_max: int
    pue: float
    price_series: HourlySeries
    carbon_series: HourlySeries

    def make_dc(self) -> DataCenter:
        return DataCenter(
            id=self.id,
            zone=self.zone,
            r_max=self.r_max,
            pue=self.pue,
            price_series=self.price_series,
            carbon_series=self.carbon_series,
        )


@dataclass
class NormScales:
    """Per-feature divisors keeping observation magnitudes near unity."""

    gpus: float
    duration: float
    price: float
    carbon: float
    time: float
    step: float = 8.0

    def as_dict(self) -> dict:
        return {
            "gpus": self.gpus,
            "duration": self.duration,
            "price": self.price,
            "carbon": self.carbon,
            "time": self.time,
            "step": self.step,
        }


@dataclass
class World:
    """Everything an environment needs, with series on a common clock."""

    blueprints: list
    links: dict
    econ: EconomicsConfig
    horizon_min: int
    workload_params: WorkloadParams | None
    fixed_jobs: list | None
    scales: NormScales
    master_seed: int

    @property
    def n_dcs(self) -> int:
        return len(self.blueprints)

    def jobs_for(self, index: int = 0) -> list[Job]:
        """Workload for environment ``index``; fixed workloads ignore it."""
        if self.fixed_jobs is not None:
            return [
                Job(
                    id=j.id, src_dc=j.src_dc, data_gb=j.data_gb, model_gb=j.model_gb,
                    arrival_min=j.arrival_min, gpus=j.gpus,
                    duration_min=j.duration_min, slack_min=j.slack_min,
                )
                for j in self.fixed_jobs
            ]
        return synthesize_workload(
            self.workload_params,
            self.n_dcs,
            self.horizon_min,
            seed_int(self.master_seed, DOMAIN_WORKLOAD, index),
        )


def build_world(cfg: ScenarioConfig, base_dir) -> World:
    """Load series, align clocks, and assemble the immutable world."""
    cfg.validate()
    base = Path(base_dir)
    blueprints = []
    starts = set()
    for i, spec in enumerate(cfg.dcs):
        price = load_series(base / spec.price_csv, "price")
        carbon = load_series(base / spec.carbon_csv, "carbon")
        starts.add(price.start_epoch_min)
        starts.add(carbon.start_epoch_min)
        blueprints.append((i, spec, price, carbon))
    if len(starts) != 1:
        raise ConfigError(f"series start times differ across files: {sorted(starts)}")
    final = []
    for i, spec, price, carbon in blueprints:
        price = price.rebased(0)
        carbon = carbon.rebased(0)
        for series in (price, carbon):
            if series.end_min < cfg.horizon_min:
                raise ConfigError(
                    f"series {series.label!r} covers {series.end_min} min "
                    f"< horizon {cfg.horizon_min}"
                )
        final.append(
            DcBlueprint(i, spec.zone, spec.r_max, spec.pue, price, carbon)
        )
    links = build_links(
        cfg.n_dcs,
        throughput_gb_per_min=cfg.links.throughput_gb_per_min,
        cost_usd_per_gb=cfg.links.cost_usd_per_gb,
        energy_kwh_per_gb=cfg.links.energy_kwh_per_gb,
    )
    for o in cfg.links.overrides:
        key = (int(o["from_dc"]), int(o["to_dc"]))
        links = {
            **links,
            key: NetworkLink(
                key[0],
                key[1],
                float(o.get("throughput_gb_per_min", cfg.links.throughput_gb_per_min)),
                float(o.get("cost_usd_per_gb", cfg.links.cost_usd_per_gb)),
                float(o.get("energy_kwh_per_gb", cfg.links.energy_kwh_per_gb)),
            ),
        }
    if cfg.workload.path is not None:
        fixed_jobs = load_workload(base / cfg.workload.path)
        params = None
        max_duration = max((j.duration_min for j in fixed_jobs), default=60)
    else:
        fixed_jobs = None
        params = cfg.workload.params()
        max_duration = max(jt.duration_min[1] for jt in params.job_types)
    scales = NormScales(
        gpus=float(max(d.r_max for d in final)),
        duration=float(max_duration),
        price=float(max(np.max(d.price_series.values) for d in final)),
        carbon=float(max(np.max(d.carbon_series.values) for d in final)),
        time=float(cfg.horizon_min),
    )
    return World(
        blueprints=final,
        links=links,
        econ=cfg.economics,
        horizon_min=cfg.horizon_min,
        workload_params=params,
        fixed_jobs=fixed_jobs,
        scales=scales,
        master_seed=cfg.seed,
    )


def workload_digest(jobs: list[Job]) -> str:
    """Stable hash used to prove all scenarios saw the same workload."""
    h = hashlib.sha256()
    for j in jobs:
        h.update(
            f"{j.id},{j.src_dc},{j.arrival_min},{j.gpus},{j.duration_min},"
            f"{j.slack_min},{j.data_gb!r},{j.model_gb!r}\n".encode()
        )
    return h.hexdigest()
