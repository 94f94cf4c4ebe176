import pytest

from memepipe.config import ConfigInvalid, load_config, validate_config


def _write(tmp_path, text):
    path = tmp_path / "config.yaml"
    path.write_text(text, encoding="utf-8")
    return path


class TestValidateConfig:
    def test_defaults_from_empty_file(self, tmp_path):
        config, errors = validate_config(_write(tmp_path, ""))
        assert errors == []
        assert config.quorum == 3
        assert config.tau == 0.5
        assert config.service_port == 8777
        assert set(config.gates) == {"4chan", "x", "weibo"}

    def test_missing_file(self, tmp_path):
        config, errors = validate_config(tmp_path / "nope.yaml")
        assert config is None
        assert errors

    def test_unparseable_yaml(self, tmp_path):
        config, errors = validate_config(_write(tmp_path, "a: [unclosed"))
        assert config is None

    def test_all_violations_reported(self, tmp_path):
        config, errors = validate_config(_write(tmp_path, "\n".join([
            "quorum: 0",
            "tau: 1.5",
            "accept_threshold: 0",
            "lease_seconds: -1",
        ])))
        assert config is None
        assert len(errors) == 4

    def test_provider_validation(self, tmp_path):
        config, errors = validate_config(_write(tmp_path, "\n".join([
            "ensemble:",
            "  - provider_id: a",
            "    kind: http",
            "  - provider_id: a",
            "    kind: subprocess",
        ])))
        assert config is None
        assert any("needs endpoint" in e for e in errors)
        assert any("needs command" in e for e in errors)
        assert any("duplicate provider_id" in e for e in errors)

    def test_valid_ensemble(self, tmp_path):
        config, errors = validate_config(_write(tmp_path, "\n".join([
            "ensemble:",
            "  - provider_id: a",
            "    kind: mock",
            "  - provider_id: b",
            "    kind: http",
            "    endpoint: http://localhost:9000/v1",
        ])))
        assert errors == []
        assert [p.provider_id for p in config.ensemble] == ["a", "b"]

    def test_platform_overrides(self, tmp_path):
        config, errors = validate_config(_write(tmp_path, "\n".join([
            "platforms:",
            "  x:",
            "    gate:",
            "      post_min: 5",
            "      post_max: 100",
        ])))
        assert errors == []
        assert config.gates["x"].post_min == 5
        assert config.gates["4chan"].post_max == 500

    def test_env_interpolation(self, tmp_path, monkeypatch):
        monkeypatch.setenv("API_TOKEN", "sek-ret")
        config, errors = validate_config(_write(tmp_path, "\n".join([
            "ensemble:",
            "  - provider_id: a",
            "    kind: http",
            "    endpoint: http://host/v1?token=${API_TOKEN}",
        ])))
        assert errors == []
        assert "sek-ret" in config.ensemble[0].endpoint

    def test_unset_env_left_verbatim(self, tmp_path, monkeypatch):
        monkeypatch.delenv("NOT_SET_ANYWHERE", raising=False)
        config, errors = validate_config(_write(tmp_path, "store: ${NOT_SET_ANYWHERE}"))
        assert config.store == "${NOT_SET_ANYWHERE}"


class TestLoadConfig:
    def test_raises_with_all_errors(self, tmp_path):
        path = _write(tmp_path, "quorum: 0\ntau: 2.0")
        with pytest.raises(ConfigInvalid) as err:
            load_config(path)
        assert len(err.value.errors) == 2
