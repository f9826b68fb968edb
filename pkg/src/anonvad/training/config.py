"""Training hyperparameters for every pipeline stage."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import ConfigError
from ..losses import LossConfig


@dataclass
class TrainConfig:
    """Stage budgets, learning rates and batch sizes.

    Defaults follow the reference recipe: 80 anonymization epochs at lr 1e-4
    with batch 8 for the anonymizer/utility/budget trio, anomaly training
    capped at 1000 epochs (early stopped) at lr 1e-3 with weight decay 5e-4,
    batch 16 and feature dropout 0.7, and the privacy attack at lr 1e-3 with
    1/5 step-downs on stagnation. `seed` has no default on purpose.
    """

    seed: int
    anon_epochs: int = 80
    ad_epochs: int = 1000
    ad_patience: int = 50
    lr_anonymizer: float = 1e-4
    lr_utility: float = 1e-4
    lr_budget: float = 1e-4
    lr_anomaly: float = 1e-3
    weight_decay_anomaly: float = 5e-4
    batch_anon: int = 8
    batch_anomaly: int = 16
    batch_attack: int = 32
    loss: LossConfig = field(default_factory=LossConfig)
    # identity pretraining of the anonymizer
    identity_epochs: int = 20
    identity_threshold: float = 0.05
    identity_batch: int = 32
    identity_frames_per_epoch: int = 1024
    # encoder initialization (stands in for large-scale pretrained weights);
    # lr_init=None falls back to the per-branch minimax rates
    encoder_init_epochs: int = 8
    budget_init_epochs: int = 4
    lr_init: float | None = None
    # privacy attack schedule
    attack_epochs: int = 100
    attack_lr: float = 1e-3
    attack_lr_decay: float = 0.2
    attack_lr_floor: float = 1e-12
    # feature-leakage probe schedule
    probe_epochs: int = 50
    probe_lr: float = 1e-4
    # triplet sampling: None draws the negative offset uniformly
    negative_distance: int | None = None
    # ablation switch: temporal-invariance contrastive term instead of the
    # temporally-distinct triplet in the utility loss
    use_invariance_utility: bool = False
    # adversarial step-2 reuses the step-1 minibatch unless set
    fresh_batch_step2: bool = False
    # single-threaded deterministic execution; also drops wall-clock from logs
    reference_mode: bool = False

    def __post_init__(self):
        if not isinstance(self.seed, int):
            raise ConfigError(f"seed must be an integer, got {self.seed!r}")
        for name in (
            "anon_epochs",
            "ad_epochs",
            "identity_epochs",
            "encoder_init_epochs",
            "budget_init_epochs",
            "attack_epochs",
            "probe_epochs",
            "batch_anon",
            "batch_anomaly",
            "batch_attack",
            "identity_batch",
        ):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be >= 1, got {getattr(self, name)}")
        for name in (
            "lr_anonymizer",
            "lr_utility",
            "lr_budget",
            "lr_anomaly",
            "attack_lr",
            "probe_lr",
        ):
            if getattr(self, name) <= 0:
                raise ConfigError(f"{name} must be > 0, got {getattr(self, name)}")
        if self.negative_distance is not None and self.negative_distance == 0:
            raise ConfigError("negative_distance must be non-zero or None")
