"""Pipeline configuration read from an INI file.

Every key has a default, so an empty or absent file yields the standard
settings. The CLI overrides individual keys from its flags and echoes the
effective configuration into the output directory.
"""

from __future__ import annotations

import configparser
import os
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

from .gcn.model import GcnConfig
from .weaklabel.labeling import SIMILARITY_THRESHOLD

OUT_ENV = "RUMORGRAPH_OUT"
DEFAULT_OUT = "artifacts"


@dataclass(frozen=True)
class PipelineConfig:
    # [input]
    input: str = ""
    incident: str = ""
    # [embedding]
    embedding_file: str = ""
    embedding_dim: int = 300
    # [minhash]
    threshold: float = SIMILARITY_THRESHOLD
    num_hashes: int = 256
    shingle_size: int = 2
    minhash_seed: int = 42
    # [graph]
    weighted_adjacency: bool = True
    # [gcn]
    gcn: GcnConfig = field(default_factory=GcnConfig)
    # [eval]
    k: int = 5
    stratified: bool = True
    ablation: str = "both"
    bins: int = 10
    permutations: int = 1000
    # [run]
    seed: int = 42
    out: str = ""

    def __post_init__(self):
        if self.ablation not in ("gcn", "mlp", "both"):
            raise ValueError(f"ablation must be gcn, mlp or both, not {self.ablation!r}")
        if not 0.0 <= self.threshold <= 1.0:
            raise ValueError("threshold must be in [0, 1]")
        if self.k < 2:
            raise ValueError("k must be at least 2")

    @property
    def models(self) -> tuple[str, ...]:
        return ("gcn", "mlp") if self.ablation == "both" else (self.ablation,)

    def out_dir(self) -> Path:
        return Path(self.out or os.environ.get(OUT_ENV) or DEFAULT_OUT)


# section -> (attribute, ini key) pairs; "gcn.<name>" addresses GcnConfig fields
_LAYOUT = {
    "input": [("input", "path"), ("incident", "incident")],
    "embedding": [("embedding_file", "file"), ("embedding_dim", "dimension")],
    "minhash": [("threshold", "threshold"), ("num_hashes", "num_hashes"), ("shingle_size", "shingle_size"), ("minhash_seed", "seed")],
    "graph": [("weighted_adjacency", "weighted")],
    "gcn": [(f"gcn.{f.name}", f.name) for f in fields(GcnConfig) if f.name != "seed"],
    "eval": [("k", "k"), ("stratified", "stratified"), ("ablation", "ablation"), ("bins", "bins"), ("permutations", "permutations")],
    "run": [("seed", "seed"), ("out", "out")],
}


def _get(cfg: PipelineConfig, attr: str):
    if attr.startswith("gcn."):
        return getattr(cfg.gcn, attr[4:])
    return getattr(cfg, attr)


def _convert(raw: str, like):
    if isinstance(like, bool):
        v = raw.strip().lower()
        if v in ("1", "true", "yes", "on"):
            return True
        if v in ("0", "false", "no", "off"):
            return False
        raise ValueError(f"not a boolean: {raw!r}")
    if isinstance(like, int):
        return int(raw)
    if isinstance(like, float):
        return float(raw)
    return raw.strip()


def with_overrides(cfg: PipelineConfig, **values) -> PipelineConfig:
    """Replace top-level or ``gcn_<name>`` keys; ``None`` values are ignored."""
    top, gcn = {}, {}
    for k, v in values.items():
        if v is None:
            continue
        if k.startswith("gcn_"):
            gcn[k[4:]] = v
        else:
            top[k] = v
    if gcn:
        top["gcn"] = replace(top.get("gcn", cfg.gcn), **gcn)
    return replace(cfg, **top)


def load_config(path: str | Path | None = None) -> PipelineConfig:
    """Read an INI file; ``None`` or ``"default"`` gives the built-in defaults."""
    cfg = PipelineConfig()
    if path is None or str(path) == "default":
        return cfg
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"config file {path} not found")
    parser = configparser.ConfigParser(interpolation=None)
    parser.read(path, encoding="utf-8")
    known = {s: {key for _, key in pairs} for s, pairs in _LAYOUT.items()}
    for section in parser.sections():
        if section not in known:
            raise ValueError(f"{path}: unknown section [{section}]")
        for key in parser[section]:
            if key not in known[section]:
                raise ValueError(f"{path}: unknown key {key!r} in [{section}]")
    updates = {}
    for section, pairs in _LAYOUT.items():
        if section not in parser:
            continue
        for attr, key in pairs:
            if key in parser[section]:
                raw = parser[section][key]
                try:
                    updates[attr.replace(".", "_")] = _convert(raw, _get(cfg, attr))
                except ValueError as exc:
                    raise ValueError(f"{path}: [{section}] {key}: {exc}") from None
    return with_overrides(cfg, **updates)


def dump_config(cfg: PipelineConfig) -> str:
    """INI text of every key, in a fixed order."""
    lines = []
    for section, pairs in _LAYOUT.items():
        lines.append(f"[{section}]")
        for attr, key in pairs:
            v = _get(cfg, attr)
            lines.append(f"{key} = {str(v).lower() if isinstance(v, bool) else v}")
        lines.append("")
    return "\n".join(lines)


def write_config(cfg: PipelineConfig, path: str | Path) -> Path:
    path = Path(path)
    path.write_text(dump_config(cfg), encoding="utf-8")
    return path
