# Copyright 2026 The segser Authors. All Rights Reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Segmental speech emotion features, preprocessing and linear SVM evaluation."""

import json as _json

from ._segser import (  # noqa: F401
    AudioClip,
    BinarySvmModel,
    ExperimentConfig,
    MulticlassSvmModel,
    PcaModel,
    PitchEstimate,
    PitchOptions,
    SegmentationScheme,
    SegserError,
    SvmOptions,
    ZScoreModel,
    acf,
    assemble,
    compute_metrics,
    delta,
    emodb_label,
    estimate_pitch,
    frames,
    functionals,
    hnr,
    load_wav,
    mfcc,
    pca_fit,
    pitch_histogram,
    rms_energy,
    segment,
    train_binary,
    train_multiclass,
    write_wav,
    zcr,
    zscore_fit,
)
from . import _segser

__version__ = "0.1.0"


def config(base=None, **overrides):
    """Builds an ExperimentConfig from a dict (same keys as the JSON config file)."""
    merged = dict(base or {})
    merged.update(overrides)
    return ExperimentConfig.from_json(_json.dumps(merged))


def _as_config(c):
    return c if isinstance(c, ExperimentConfig) else config(c)


def feature_dimension(c):
    return _as_config(c).feature_dimension


def loocv_features(X, labels, classes, c=None):
    """Leave-one-out evaluation of a feature matrix; returns the report as a dict."""
    return _json.loads(_segser.loocv_features(X, list(labels), list(classes), _as_config(c)))


def loocv(manifest, c=None, skip_bad=False):
    """Leave-one-out evaluation of a manifest CSV; returns the report as a dict."""
    return _json.loads(_segser.loocv(str(manifest), _as_config(c), skip_bad))
