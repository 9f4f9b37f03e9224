import json

import pytest
from hypothesis import given, strategies as st

from simulatar.errors import ConfigError, DomainError, ValidationError
from simulatar.profiles import (
    DEFAULT_OPACITY_CURVE,
    CameraProfile,
    ContextClip,
    HmdProfile,
    LightingClass,
    Location,
    Mobility,
    eval_curve,
    load_profiles,
    scan_context_library,
)


class TestBuiltinDefaults:
    def test_hl2_resolution(self):
        reg = load_profiles(None)
        assert reg.hmd("hl2").display_resolution == (1440, 936)

    def test_nreal_resolution(self):
        reg = load_profiles(None)
        assert reg.hmd("nreal-light").display_resolution == (1920, 1080)

    def test_gopro_profile(self):
        reg = load_profiles(None)
        cam = reg.camera("gopro-hero10-linear")
        assert cam.diagonal_fov_deg == 95
        assert cam.frame_resolution == (2704, 1520)
        assert cam.fps == 50

    def test_deterministic_and_side_effect_free(self):
        assert load_profiles(None) == load_profiles(None)

    def test_unknown_ids_raise(self):
        reg = load_profiles(None)
        with pytest.raises(ConfigError):
            reg.hmd("nope")
        with pytest.raises(ConfigError):
            reg.camera("nope")


class TestConfigOverrides:
    def test_user_values_win(self, tmp_path):
        cfg = tmp_path / "profiles.json"
        cfg.write_text(json.dumps({"hmd_profiles": {"hl2": {"transmittance": 0.55}}}))
        reg = load_profiles(cfg)
        assert reg.hmd("hl2").transmittance == 0.55
        # untouched fields keep their defaults
        assert reg.hmd("hl2").display_resolution == (1440, 936)

    def test_new_profile_added(self, tmp_path):
        cfg = tmp_path / "profiles.json"
        cfg.write_text(
            json.dumps(
                {
                    "hmd_profiles": {
                        "custom": {
                            "display_resolution": [800, 600],
                            "diagonal_fov_deg": 40,
                            "transmittance": 0.5,
                            "contrast_curve": [[100, 1.0], [10000, 0.5]],
                            "opacity_curve": [[100, 1.0], [10000, 0.7]],
                        }
                    }
                }
            )
        )
        reg = load_profiles(cfg)
        assert reg.hmd("custom").display_resolution == (800, 600)
        assert reg.hmd("hl2").display_resolution == (1440, 936)

    def test_invalid_transmittance_rejected(self, tmp_path):
        cfg = tmp_path / "profiles.json"
        cfg.write_text(json.dumps({"hmd_profiles": {"hl2": {"transmittance": 1.5}}}))
        with pytest.raises(ValidationError, match="transmittance"):
            load_profiles(cfg)

    def test_parse_failure_reports_line(self, tmp_path):
        cfg = tmp_path / "profiles.json"
        cfg.write_text('{\n  "hmd_profiles": {\n')
        with pytest.raises(ConfigError, match="line"):
            load_profiles(cfg)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            load_profiles(tmp_path / "nope.json")


class TestProfileInvariants:
    def _hmd(self, **overrides):
        base = dict(
            id="x",
            display_resolution=(100, 100),
            diagonal_fov_deg=50,
            transmittance=0.5,
            contrast_curve=((100.0, 1.0), (10000.0, 0.5)),
            opacity_curve=((100.0, 1.0), (10000.0, 0.5)),
        )
        base.update(overrides)
        return HmdProfile(**base)

    @pytest.mark.parametrize("transmittance", [0.0, -0.1, 1.01])
    def test_transmittance_range(self, transmittance):
        with pytest.raises(ValidationError):
            self._hmd(transmittance=transmittance)

    @pytest.mark.parametrize("fov", [0.0, 180.0, 200.0, -5.0])
    def test_fov_range(self, fov):
        with pytest.raises(ValidationError):
            self._hmd(diagonal_fov_deg=fov)

    def test_resolution_positive(self):
        with pytest.raises(ValidationError):
            self._hmd(display_resolution=(0, 100))

    def test_curve_needs_two_anchors(self):
        with pytest.raises(ValidationError, match="anchors"):
            self._hmd(contrast_curve=((100.0, 1.0),))

    def test_curve_lux_strictly_increasing(self):
        with pytest.raises(ValidationError, match="increasing"):
            self._hmd(contrast_curve=((100.0, 1.0), (100.0, 0.5)))

    def test_curve_values_in_unit_range(self):
        with pytest.raises(ValidationError):
            self._hmd(contrast_curve=((100.0, 1.2), (10000.0, 0.5)))

    def test_camera_rejects_bad_fov(self):
        with pytest.raises(ValidationError):
            CameraProfile(id="c", frame_resolution=(10, 10), diagonal_fov_deg=180)

    def test_context_clip_lux_positive(self, tmp_path):
        with pytest.raises(ValidationError):
            ContextClip(
                id="c",
                frames_path=tmp_path,
                location=Location.INDOOR,
                mobility=Mobility.SITTING,
                lighting_lux=0,
                lighting_class=LightingClass.LOW,
                camera="gopro-hero10-linear",
            )


class TestEvalCurve:
    def test_anchor_point(self):
        assert eval_curve(DEFAULT_OPACITY_CURVE, 100) == 1.0

    def test_log_midpoint(self):
        # log10(1000) is halfway between log10(100) and log10(10000)
        assert eval_curve(DEFAULT_OPACITY_CURVE, 1000) == pytest.approx(0.8, abs=1e-12)

    def test_clamp_below(self):
        assert eval_curve(DEFAULT_OPACITY_CURVE, 50) == 1.0

    def test_clamp_above(self):
        assert eval_curve(DEFAULT_OPACITY_CURVE, 20000) == 0.6

    def test_nonpositive_lux_rejected(self):
        with pytest.raises(DomainError):
            eval_curve(DEFAULT_OPACITY_CURVE, 0)
        with pytest.raises(DomainError):
            eval_curve(DEFAULT_OPACITY_CURVE, -10)

    @given(st.floats(min_value=1.0, max_value=1e6))
    def test_output_within_anchor_value_range(self, lux):
        curve = ((50.0, 0.9), (500.0, 0.4), (5000.0, 0.7))
        value = eval_curve(curve, lux)
        assert 0.4 <= value <= 0.9

    @given(
        st.floats(min_value=1.0, max_value=1e5),
        st.floats(min_value=1.0, max_value=1e5),
    )
    def test_monotone_decreasing_anchors(self, lux_a, lux_b):
        curve = ((100.0, 1.0), (1000.0, 0.7), (10000.0, 0.3))
        lo, hi = sorted((lux_a, lux_b))
        assert eval_curve(curve, lo) >= eval_curve(curve, hi)


class TestContextLibrary:
    def _make_context(self, root, context_id, lux=250.0):
        ctx = root / "contexts" / context_id
        (ctx / "frames").mkdir(parents=True)
        (ctx / "meta.json").write_text(
            json.dumps(
                {
                    "location": "indoor",
                    "mobility": "sitting",
                    "lighting_lux": lux,
                    "lighting_class": "low",
                    "camera": "gopro-hero10-linear",
                }
            )
        )

    def test_scan_orders_by_id(self, tmp_path):
        self._make_context(tmp_path, "office")
        self._make_context(tmp_path, "bus")
        clips = scan_context_library(tmp_path)
        assert list(clips) == ["bus", "office"]
        assert clips["office"].location is Location.INDOOR

    def test_empty_library(self, tmp_path):
        assert scan_context_library(tmp_path) == {}

    def test_bad_meta_rejected(self, tmp_path):
        ctx = tmp_path / "contexts" / "broken"
        ctx.mkdir(parents=True)
        (ctx / "meta.json").write_text("{not json")
        with pytest.raises(ConfigError):
            scan_context_library(tmp_path)
