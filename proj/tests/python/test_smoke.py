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

import math

import numpy as np
import pytest

import segser


def tone(hz, n=400, sr=16000, amp=0.5):
    return [amp * math.sin(2 * math.pi * hz * i / sr) for i in range(n)]


def synth_clip(f0, seconds=1.0, sr=16000, rng=None):
    rng = rng or np.random.default_rng(0)
    t = np.arange(int(seconds * sr)) / sr
    x = sum(0.6**h * np.sin(2 * np.pi * f0 * (h + 1) * t) for h in range(4))
    x = 0.3 * x * np.hanning(t.size) + 0.005 * rng.standard_normal(t.size)
    return segser.AudioClip(np.clip(x, -1, 1).tolist(), sr, "clip")


def test_wav_round_trip(tmp_path):
    clip = segser.AudioClip(tone(220, 1600), 16000, "a")
    path = tmp_path / "a.wav"
    segser.write_wav(path, clip)
    back = segser.load_wav(path)
    assert back.sample_rate == 16000
    assert len(back) == 1600
    assert np.max(np.abs(back.samples - clip.samples)) < 1e-4
    assert back.source_id == "a"


def test_frames_shape():
    clip = segser.AudioClip([0.0] * 16000, 16000)
    f = segser.frames(clip)
    assert f.shape == (98, 400)


def test_lld_functions():
    x = tone(200)
    assert segser.rms_energy(x) == pytest.approx(0.5 / math.sqrt(2), rel=1e-3)
    assert 0 < segser.zcr(x) < 0.05
    est = segser.estimate_pitch(x, 16000)
    assert est.voiced
    assert est.hz == pytest.approx(200, abs=2)
    assert segser.hnr(x, est.lag) >= 30
    assert not segser.estimate_pitch([0.0] * 400, 16000).voiced
    assert len(segser.mfcc(x, 16000)) == 12
    assert segser.delta([1.0, 2.0, 3.0, 4.0, 5.0])[2] == pytest.approx(1.0)
    assert segser.acf(x, 0) > 0


def test_segmentation_and_histogram():
    clip = segser.AudioClip([0.0] * 16000, 16000)
    assert segser.segment(clip, segser.SegmentationScheme.rti(3)) == [(0, 5333), (5333, 5333), (10666, 5334)]
    assert segser.pitch_histogram([60, 60, 160, 460]) == [0.5, 0, 0.25, 0, 0, 0, 0, 0, 0.25]
    assert segser.pitch_histogram([None, None]) == [0.0] * 9
    f = segser.functionals([0, 1, 2, 3])
    assert f["mean"] == pytest.approx(1.5)
    assert f["lr_slope"] == pytest.approx(3.0)


def test_feature_dimensions():
    assert segser.feature_dimension({"scheme": "gti"}) == 384
    assert segser.feature_dimension({"scheme": "gti", "include_hist": True}) == 411
    assert segser.feature_dimension({"scheme": {"rti": 3}}) == 1152
    assert segser.feature_dimension({"scheme": {"rti": 3}, "include_hist": True}) == 1179
    cfg = segser.config(scheme={"rti": 3}, include_hist=True)
    v = segser.assemble(synth_clip(150), cfg)
    assert v.shape == (1179,)
    assert np.all(np.isfinite(v))
    assert cfg.feature_names[384] == "s0.f0hist.50-100"
    with pytest.raises(ValueError):
        segser.config(scheme={"rti": 0})


def test_preprocess():
    rng = np.random.default_rng(1)
    X = rng.standard_normal((50, 10)) * np.arange(1, 11)
    z = segser.zscore_fit(X)
    Z = z.apply(X)
    assert np.allclose(Z.mean(axis=0), 0, atol=1e-9)
    assert np.allclose(Z.std(axis=0), 1, atol=1e-9)
    p = segser.pca_fit(X, 0.99)
    assert p.components.shape == (p.k, 10)
    assert np.allclose(p.components @ p.components.T, np.eye(p.k), atol=1e-8)
    assert p.transform(X).shape == (50, p.k)


def test_svm():
    b = segser.train_binary(np.array([[-1.0], [1.0]]), [-1, 1])
    assert b.w[0] == pytest.approx(1.0, abs=1e-4)
    assert b.b == pytest.approx(0.0, abs=1e-4)
    rng = np.random.default_rng(2)
    centers = np.array([[0, 0], [10, 0], [0, 10]])
    X = np.vstack([c + 0.1 * rng.standard_normal((30, 2)) for c in centers])
    y = np.repeat([0, 1, 2], 30)
    m = segser.train_multiclass(X, y.tolist())
    assert m.pair_count == 3
    assert all(m.predict(x) == t for x, t in zip(X, y))
    assert m.votes(np.array([10.0, 0.0])) == [1, 2, 0]
    with pytest.raises(ValueError):
        segser.train_binary(np.ones((2, 1)), [1, 1])


def test_metrics_and_emodb():
    r = segser.compute_metrics([[9, 1], [5, 5]])
    assert r["wa"] == pytest.approx(0.7)
    assert r["ua"] == pytest.approx(0.7)
    assert segser.emodb_label("03a01Fa.wav") == ("happiness", "03")
    assert segser.emodb_label("03a01Wb.wav") == ("anger", "03")
    assert segser.emodb_label("notes.txt") is None


def test_loocv_on_features():
    rng = np.random.default_rng(3)
    X = np.vstack([c + 0.2 * rng.standard_normal((8, 3)) for c in ([0, 0, 0], [4, 0, 0], [0, 4, 0])])
    labels = [0] * 8 + [1] * 8 + [2] * 8
    report = segser.loocv_features(X, labels, ["a", "b", "c"], {"pca": 0.99})
    assert report["wa"] == 1.0
    assert report["confusion"] == [[8, 0, 0], [0, 8, 0], [0, 0, 8]]
    assert report["dims_before"] == 3


def test_loocv_on_manifest(tmp_path):
    rows = ["path,label,speaker"]
    for label, f0 in (("low", 110), ("high", 260)):
        for k in range(3):
            name = f"{label}{k}.wav"
            segser.write_wav(tmp_path / name, synth_clip(f0 + 3 * k, rng=np.random.default_rng(k)))
            rows.append(f"{name},{label},s{k}")
    (tmp_path / "m.csv").write_text("\n".join(rows) + "\n")
    report = segser.loocv(tmp_path / "m.csv", {"scheme": {"rti": 3}, "include_hist": True})
    assert report["dims_before"] == 1179
    assert sum(map(sum, report["confusion"])) == 6
    assert report["classes"] == ["high", "low"]
