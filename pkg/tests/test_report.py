import math

from resyduo import (
    KnnConfig,
    build_projection,
    cross_validate,
    generate_synthetic_corpus,
    grid_search,
)
from resyduo.projections import CutoffConfig
from resyduo.report import fold_metrics_figure, save_figure, scoreboard_figure
from resyduo.tuning import GridSpec, TuningResult


def small_report():
    corpus = generate_synthetic_corpus(30, 10, 12, 10, 2, 0.2, seed=8)
    P = build_projection(corpus, "P")
    return cross_validate(P, KnnConfig(k=10), CutoffConfig(1, 1), k=4, n=5, seed=8)


def test_fold_metrics_figure_renders_png(tmp_path):
    fig = fold_metrics_figure(small_report())
    out = tmp_path / "metrics.png"
    save_figure(fig, out)
    data = out.read_bytes()
    assert data[:8] == b"\x89PNG\r\n\x1a\n"
    assert len(data) > 1000


def test_figure_bytes_are_deterministic(tmp_path):
    rep = small_report()
    save_figure(fold_metrics_figure(rep), tmp_path / "a.png")
    save_figure(fold_metrics_figure(rep), tmp_path / "b.png")
    assert (tmp_path / "a.png").read_bytes() == (tmp_path / "b.png").read_bytes()


def test_scoreboard_figure_renders(tmp_path):
    corpus = generate_synthetic_corpus(30, 10, 12, 10, 2, 0.2, seed=8)
    P = build_projection(corpus, "P")
    spec = GridSpec(similarities=("msd", "cosine"), modes=("user",), min_supports=(1,), ks=(5,))
    result = grid_search(P, spec, CutoffConfig(1, 1), k_folds=2, seed=1)
    out = tmp_path / "scores.png"
    save_figure(scoreboard_figure(result), out)
    assert out.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"


def test_scoreboard_figure_tolerates_sentinel_scores(tmp_path):
    # configs that failed evaluation carry +/-inf; the chart must not choke
    result = TuningResult(
        best=KnnConfig(),
        scoreboard=(
            (KnnConfig(), 0.4),
            (KnnConfig(similarity="cosine"), math.inf),
            (KnnConfig(similarity="pearson"), -math.inf),
        ),
        criterion="rmse",
    )
    out = tmp_path / "inf.png"
    save_figure(scoreboard_figure(result), out)
    assert out.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"
