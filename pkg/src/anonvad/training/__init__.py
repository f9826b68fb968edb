from .config import TrainConfig
from .log import TrainLog
from .pretrain import action_accuracy, init_encoders, pretrain_identity
from .minimax import train_anonymization
from .features import (
    FeatureSet,
    extract_features,
    load_feature_file,
    load_features_dir,
    mean_intra_video_distance,
    save_feature_file,
    save_features_dir,
)
from .anomaly import evaluate_anomaly_detector, train_anomaly_detector
from .privacy import (
    evaluate_attribute_model,
    extract_probe_features,
    stack_image_to_clip,
    train_feature_probe,
    train_privacy_attack,
    transform_privacy_images,
)

__all__ = [
    "FeatureSet",
    "TrainConfig",
    "TrainLog",
    "action_accuracy",
    "evaluate_anomaly_detector",
    "evaluate_attribute_model",
    "extract_features",
    "extract_probe_features",
    "init_encoders",
    "load_feature_file",
    "load_features_dir",
    "mean_intra_video_distance",
    "pretrain_identity",
    "save_feature_file",
    "save_features_dir",
    "stack_image_to_clip",
    "train_anomaly_detector",
    "train_anonymization",
    "train_feature_probe",
    "train_privacy_attack",
    "transform_privacy_images",
]
