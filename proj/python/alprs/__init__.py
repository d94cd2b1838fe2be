"""License plate recognition: SIFT plate location, Otsu segmentation, transition OCR."""

from ._alprs import (
    AlprsError,
    Recognizer,
    binarize,
    build_template_db,
    extract_keypoints,
    load_image,
    normalize_character,
    otsu_threshold,
    prepare_glyph,
    render_plate,
    render_template,
    save_pgm,
    train_ocr,
    transition_vector,
)

__all__ = [
    "AlprsError",
    "Recognizer",
    "binarize",
    "build_template_db",
    "extract_keypoints",
    "load_image",
    "normalize_character",
    "otsu_threshold",
    "prepare_glyph",
    "render_plate",
    "render_template",
    "save_pgm",
    "train_ocr",
    "transition_vector",
]
