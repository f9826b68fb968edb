from .containers import ClipTriplet, PrivacyDataset, PrivacyImage, Video, VideoClip, VideoDataset
from .augment import AugmentationParams, augment_clip, center_crop_resize
from .sampling import sample_clip, sample_triplet
from . import storage, synthetic

__all__ = [
    "AugmentationParams",
    "ClipTriplet",
    "PrivacyDataset",
    "PrivacyImage",
    "Video",
    "VideoClip",
    "VideoDataset",
    "augment_clip",
    "center_crop_resize",
    "sample_clip",
    "sample_triplet",
    "storage",
    "synthetic",
]
