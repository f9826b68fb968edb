"""Two-step adversarial anonymization training.

Each iteration first updates the anonymizer to descend
utility_loss - budget_weight * budget_loss (preserve the task, destroy
same-video frame agreement), then, with the anonymizer frozen, updates the
utility encoder on its loss and the budget encoder on its loss. Step-1
gradients never reach the step-2 updates and vice versa: the encoder
optimizers are zeroed before their own backward passes, and step-2
anonymization runs under no_grad against the already-updated anonymizer.
"""

from __future__ import annotations

import copy
import logging
from pathlib import Path

import torch

from ..data.containers import VideoDataset
from ..errors import NumericError
from ..losses import budget_nt_xent, cross_entropy, invariance_nt_xent, triplet_distinct, utility_loss
from ..models import Anonymizer, BudgetEncoder, UtilityEncoder, save_checkpoint
from ..utils import derive_seed, seed_everything
from .batches import epoch_batches, frame_pair_batch, triplet_batch
from .config import TrainConfig
from .log import TrainLog
from .pretrain import CLIP_LENGTH, SKIP_RATE

logger = logging.getLogger(__name__)


def _distinctness(z_anchor, z_positive, z_negative, cfg: TrainConfig):
    if cfg.use_invariance_utility:
        # ablation: pull the two timestamps together instead of apart
        return invariance_nt_xent(z_anchor, z_negative, cfg.loss.temperature)
    return triplet_distinct(z_anchor, z_positive, z_negative, cfg.loss.triplet_margin)


def train_anonymization(
    anonymizer: Anonymizer,
    utility: UtilityEncoder,
    budget: BudgetEncoder,
    dataset: VideoDataset,
    cfg: TrainConfig,
    checkpoint_dir: Path | str | None = None,
) -> TrainLog:
    """Run the adversarial loop over the proxy action dataset.

    On divergence the last end-of-epoch parameters are written to
    `checkpoint_dir` (when given) before NumericError is raised.
    """
    rng = seed_everything(derive_seed(cfg.seed, "minimax"))
    log = TrainLog("train_anonymization", track_time=not cfg.reference_mode)
    out_size = anonymizer.resolution
    opt_anon = torch.optim.Adam(anonymizer.parameters(), lr=cfg.lr_anonymizer)
    opt_util = torch.optim.Adam(utility.parameters(), lr=cfg.lr_utility)
    opt_budget = torch.optim.Adam(budget.parameters(), lr=cfg.lr_budget)
    videos = list(dataset)
    last_good = None

    def _abort(reason: str):
        if checkpoint_dir is not None and last_good is not None:
            for name, (model, state) in last_good.items():
                model.load_state_dict(state)
                save_checkpoint(model, Path(checkpoint_dir) / f"last_good_{name}")
        raise NumericError(
            f"anonymization training diverged ({reason}); "
            + (
                f"last good checkpoint in {checkpoint_dir}"
                if checkpoint_dir is not None and last_good is not None
                else "no checkpoint written"
            )
        )

    def _draw(batch_idx):
        chosen = [videos[i] for i in batch_idx]
        anchors, positives, negatives, labels = triplet_batch(
            chosen, rng, out_size, CLIP_LENGTH, SKIP_RATE, cfg.negative_distance
        )
        frames_a, frames_b = frame_pair_batch(anchors, positives, rng)
        return anchors, positives, negatives, labels, frames_a, frames_b

    step = 0
    for epoch in range(cfg.anon_epochs):
        anonymizer.train()
        utility.train()
        budget.train()
        for batch_idx in epoch_batches(len(videos), cfg.batch_anon, rng):
            if len(batch_idx) < 2:
                continue  # the contrastive budget term needs negatives
            batch = _draw(batch_idx)
            anchors, positives, negatives, labels, frames_a, frames_b = batch

            # Step-1: anonymizer descends utility loss and ascends budget loss.
            opt_anon.zero_grad()
            opt_util.zero_grad()
            opt_budget.zero_grad()
            anon_anchor = anonymizer(anchors)
            anon_positive = anonymizer(positives)
            anon_negative = anonymizer(negatives)
            z_a, logits = utility.encode_clip(anon_anchor)
            z_p, _ = utility.encode_clip(anon_positive)
            z_n, _ = utility.encode_clip(anon_negative)
            ce = cross_entropy(logits, labels)
            distinct = _distinctness(z_a, z_p, z_n, cfg)
            l_utility = utility_loss(ce, distinct, cfg.loss.triplet_weight)
            l_budget = budget_nt_xent(
                budget.encode_image(anonymizer(frames_a)),
                budget.encode_image(anonymizer(frames_b)),
                cfg.loss.temperature,
            )
            adversarial = l_utility - cfg.loss.budget_weight * l_budget
            if not torch.isfinite(adversarial):
                _abort(f"step-1 loss at epoch {epoch}")
            adversarial.backward()
            opt_anon.step()

            # Step-2: encoders adapt to the frozen, just-updated anonymizer.
            if cfg.fresh_batch_step2:
                anchors, positives, negatives, labels, frames_a, frames_b = _draw(batch_idx)
            opt_anon.zero_grad()
            opt_util.zero_grad()
            opt_budget.zero_grad()
            with torch.no_grad():
                anon_anchor = anonymizer(anchors)
                anon_positive = anonymizer(positives)
                anon_negative = anonymizer(negatives)
                anon_fa = anonymizer(frames_a)
                anon_fb = anonymizer(frames_b)
            z_a, logits = utility.encode_clip(anon_anchor)
            z_p, _ = utility.encode_clip(anon_positive)
            z_n, _ = utility.encode_clip(anon_negative)
            ce2 = cross_entropy(logits, labels)
            distinct2 = _distinctness(z_a, z_p, z_n, cfg)
            l_utility2 = utility_loss(ce2, distinct2, cfg.loss.triplet_weight)
            if not torch.isfinite(l_utility2):
                _abort(f"step-2 utility loss at epoch {epoch}")
            l_utility2.backward()
            opt_util.step()

            l_budget2 = budget_nt_xent(
                budget.encode_image(anon_fa),
                budget.encode_image(anon_fb),
                cfg.loss.temperature,
            )
            if not torch.isfinite(l_budget2):
                _abort(f"step-2 budget loss at epoch {epoch}")
            l_budget2.backward()
            opt_budget.step()

            step += 1
            log.append(
                epoch=epoch,
                step=step,
                ce=float(ce),
                distinct=float(distinct),
                utility=float(l_utility),
                budget=float(l_budget),
                adversarial=float(adversarial),
                utility_step2=float(l_utility2),
                budget_step2=float(l_budget2),
            )
        last_good = {
            "anonymizer": (anonymizer, copy.deepcopy(anonymizer.state_dict())),
            "utility": (utility, copy.deepcopy(utility.state_dict())),
            "budget": (budget, copy.deepcopy(budget.state_dict())),
        }
        logger.info("anonymization epoch %d/%d done", epoch + 1, cfg.anon_epochs)
    return log
