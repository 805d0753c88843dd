import pytest
from hypothesis import given
from hypothesis import strategies as st

from fracsr.config import DEFAULT_ALPHA_GRID, PipelineConfig, load_config, parse_config_text
from fracsr.errors import ConfigurationError, DomainError
from fracsr.reconstruct import ReconstructionConfig


def test_defaults():
    cfg = PipelineConfig()
    assert cfg.alpha_mode == "auto"
    assert cfg.alpha_grid == DEFAULT_ALPHA_GRID == (0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0)
    r = cfg.reconstruction
    assert (r.lam, r.eta, r.beta, r.gamma, cfg.sigma) == (0.05, 1.5, 0.9, 0.01, 0.55)


@given(
    scale=st.sampled_from([2, 4, 8, 16]),
    alpha=st.one_of(st.none(), st.floats(0.001, 1.0)),
    grid=st.lists(st.floats(0.001, 1.0), min_size=1, max_size=5),
    sigma=st.floats(0.05, 5.0),
    lam=st.floats(1e-6, 10.0),
    iters=st.integers(1, 500),
    mode=st.sampled_from(["luma", "grayscale"]),
)
def test_round_trip(scale, alpha, grid, sigma, lam, iters, mode):
    cfg = PipelineConfig(
        scale=scale,
        alpha=alpha,
        alpha_grid=tuple(grid),
        sigma=sigma,
        color_mode=mode,
        reconstruction=ReconstructionConfig(lam=lam, max_iters=iters),
    )
    assert PipelineConfig.from_text(cfg.to_text()) == cfg


def test_file_and_comments(tmp_path):
    p = tmp_path / "c.cfg"
    p.write_text("# tuned\nscale = 4\nalpha = 0.7  # fixed\n\nlambda = 0.1\n")
    cfg = load_config(p)
    assert (cfg.scale, cfg.alpha, cfg.alpha_mode, cfg.reconstruction.lam) == (4, 0.7, "fixed", 0.1)
    assert parse_config_text("a=1") == {"a": "1"}


def test_overrides_beat_file():
    cfg = PipelineConfig.from_text("alpha = 0.3\n").updated({"alpha": "auto"})
    assert cfg.alpha is None


def test_errors():
    with pytest.raises(ConfigurationError):
        PipelineConfig.from_text("colour = red\n")
    with pytest.raises(ConfigurationError):
        PipelineConfig.from_text("just words\n")
    with pytest.raises(DomainError):
        PipelineConfig(scale=3)
    with pytest.raises(DomainError):
        PipelineConfig(alpha=1.5)
    with pytest.raises(ConfigurationError):
        PipelineConfig(alpha_grid=())
    with pytest.raises(ConfigurationError):
        PipelineConfig(color_mode="lab")
