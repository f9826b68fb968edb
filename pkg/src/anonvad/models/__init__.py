from .anonymizer import Anonymizer
from .video_encoder import UtilityEncoder
from .image_encoder import AttributeClassifier, BudgetEncoder
from .anomaly_head import AnomalyHead
from .probe import PrivacyProbe
from .checkpoint import load_checkpoint, save_checkpoint

__all__ = [
    "Anonymizer",
    "AnomalyHead",
    "AttributeClassifier",
    "BudgetEncoder",
    "PrivacyProbe",
    "UtilityEncoder",
    "load_checkpoint",
    "save_checkpoint",
]
