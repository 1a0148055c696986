"""Latent feature representation learners and the name -> learner registry."""
from typing import Optional

from src.services.learners.ae_learner import AeHyperparameters, AeLearner
from src.services.learners.base import Learner
from src.services.learners.dwt_learner import DwtLearner
from src.services.learners.pca_learner import PcaLearner
from src.services.learners.user_learner import UserLearner, user_codec

LEARNER_NAMES = ("pca", "dwt", "dwt.2d", "ae")


def create_learner(
    name: str,
    dwt_levels: Optional[int] = None,
    ae_hyper: Optional[AeHyperparameters] = None,
) -> Learner:
    """
    Build a built-in learner by its config name.

    Raises:
        ValueError: Unknown learner name
    """
    key = name.strip().lower()
    if key == "pca":
        return PcaLearner()
    if key == "dwt":
        return DwtLearner(two_d=False, levels=dwt_levels)
    if key == "dwt.2d":
        return DwtLearner(two_d=True, levels=dwt_levels)
    if key == "ae":
        return AeLearner(ae_hyper)
    raise ValueError(f"unknown learner '{name}', expected one of {', '.join(LEARNER_NAMES)}")


__all__ = [
    "AeHyperparameters",
    "AeLearner",
    "DwtLearner",
    "LEARNER_NAMES",
    "Learner",
    "PcaLearner",
    "UserLearner",
    "create_learner",
    "user_codec",
]
