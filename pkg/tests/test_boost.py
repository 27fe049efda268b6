import math

import numpy as np
import pytest

from src.algorithms.algorithm1 import (
    compute_alpha,
    fit_algorithm1,
    update_weights,
    weighted_error,
)
from src.algorithms.booster import (
    BoostParams,
    decision_function,
    get_booster,
    predict,
    predict_classes,
    staged_decision_function,
)
from src.algorithms.logit_gbm import fit_logit_gbm, initial_score, log_loss, sigmoid
from src.algorithms.tree_builder import predict_tree
from src.models.ensemble import ALGORITHM1, LOGIT, BoostedEnsemble, BoostStage, SampleWeights
from src.models.matrix import ColumnSpec, Dataset, FeatureMatrix, LabelVector
from src.utils.errors import ConfigurationError, DomainError, TrainingError


def make_dataset(X, y):
    X = np.asarray(X, dtype=np.float64)
    columns = tuple(ColumnSpec(f"c{j}", "raw") for j in range(X.shape[1]))
    return Dataset(
        matrix=FeatureMatrix(values=X, columns=columns),
        labels=LabelVector(values=np.asarray(y, dtype=np.int8)),
    )


def synthetic_task(n=500, seed=0):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(n, 4))
    logits = 1.5 * X[:, 0] - X[:, 1] + 0.5 * X[:, 2] * X[:, 3]
    y = (rng.uniform(size=n) < 1.0 / (1.0 + np.exp(-logits))).astype(np.int8)
    return make_dataset(X, y)


def test_compute_alpha_values():
    assert compute_alpha(0.5) == 0.0
    assert compute_alpha(0.1) == pytest.approx(0.5 * math.log(9), abs=1e-12)
    assert compute_alpha(0.9) == pytest.approx(-0.5 * math.log(9), abs=1e-12)


def test_compute_alpha_is_antisymmetric():
    rng = np.random.default_rng(0)
    # dyadic errors, so 1 - eps is exact and the identity holds bit for bit
    for eps in rng.integers(1, 2**20, size=500) / 2**20:
        assert compute_alpha(eps) == -compute_alpha(1.0 - eps)


@pytest.mark.parametrize("eps", [0.0, 1.0, -0.1, 1.5])
def test_compute_alpha_domain(eps):
    with pytest.raises(DomainError):
        compute_alpha(eps)


def test_update_weights_fixture():
    D = SampleWeights(values=np.array([0.5, 0.5]))
    updated = update_weights(D, 0.5 * math.log(3), np.array([1.0, 1.0]), np.array([1.0, -1.0]))
    np.testing.assert_allclose(updated.values, [0.25, 0.75], atol=1e-12, rtol=0)
    expected_z = 0.5 * (3 ** -0.5 + 3 ** 0.5)
    assert updated.normalizer == pytest.approx(expected_z, abs=1e-12)


def test_update_weights_unchanged_cases():
    D = SampleWeights(values=np.array([0.1, 0.2, 0.3, 0.4]))
    y = np.array([1.0, -1.0, 1.0, -1.0])
    all_correct = update_weights(D, 1.7, y, y)
    np.testing.assert_allclose(all_correct.values, D.values, atol=1e-15)
    no_alpha = update_weights(D, 0.0, -y, y)
    np.testing.assert_allclose(no_alpha.values, D.values, atol=1e-15)


def test_update_weights_rejects_non_signed_values():
    D = SampleWeights.uniform(2)
    with pytest.raises(DomainError):
        update_weights(D, 1.0, np.array([0.0, 1.0]), np.array([1.0, 1.0]))


def test_reweighting_makes_last_stage_a_coin_flip():
    rng = np.random.default_rng(1)
    for _ in range(100):
        n = int(rng.integers(2, 30))
        D = SampleWeights(values=rng.dirichlet(np.ones(n)))
        y = rng.choice([-1.0, 1.0], size=n)
        h = y.copy()
        wrong = rng.uniform(size=n) < 0.3
        if not wrong.any() or wrong.all():
            wrong[0] = not wrong[0]
        h[wrong] *= -1
        eps = weighted_error(D, h, y)
        if not 0.0 < eps < 1.0:
            continue
        updated = update_weights(D, compute_alpha(eps), h, y)
        assert updated.values.sum() == pytest.approx(1.0, abs=1e-9)
        assert weighted_error(updated, h, y) == pytest.approx(0.5, abs=1e-9)


def test_reweighting_a_fitted_stage_makes_it_a_coin_flip():
    data = synthetic_task(300, seed=6)
    X = data.matrix.values
    y = np.where(data.labels.binary == 1.0, 1.0, -1.0)
    e = fit_algorithm1(data, BoostParams(4, 2, 0.1))

    D = SampleWeights.uniform(len(y))
    for stage in e.stages:
        h = predict_tree(stage.tree, X)
        D = update_weights(D, stage.alpha, h, y)
        assert D.values.sum() == pytest.approx(1.0, abs=1e-12)
        assert weighted_error(D, h, y) == pytest.approx(0.5, abs=1e-9)


def test_algorithm1_separable_pair_stops_after_one_stage():
    e = fit_algorithm1(make_dataset([[0.0], [1.0]], [0, 1]), BoostParams(10, 1, 0.1))
    assert len(e.stages) == 1
    assert e.stages[0].eps == 0.0
    assert e.stages[0].alpha > 0
    assert predict_classes(e, np.array([[0.0], [1.0]])).tolist() == [0, 1]


def test_algorithm1_needs_a_stage():
    with pytest.raises(ConfigurationError):
        fit_algorithm1(make_dataset([[0.0], [1.0]], [0, 1]), BoostParams(0, 1, 0.1))


def test_algorithm1_exponential_bound_on_interleaved_points():
    x = np.arange(20, dtype=float)[:, np.newaxis]
    y = np.array([0, 0, 1, 1, 0, 1, 1, 0, 0, 1, 1, 1, 0, 0, 1, 0, 1, 1, 0, 1])
    e = fit_algorithm1(make_dataset(x, y), BoostParams(10, 1, 0.1))
    assert 1 <= len(e.stages) <= 10

    # product of Z_t recomputed from the stage records
    bound = np.cumprod([stage.normalizer for stage in e.stages])
    np.testing.assert_allclose(e.train_loss, bound, rtol=1e-12)
    assert np.all(np.diff(e.train_loss) <= 1e-12)
    assert all(err <= b + 1e-12 for err, b in zip(e.train_error, e.train_loss))

    # replay the weights from scratch and compare each Z_t
    D = SampleWeights.uniform(20)
    signed = np.where(y == 1, 1.0, -1.0)
    for stage in e.stages:
        h = predict_tree(stage.tree, x)
        assert weighted_error(D, h, signed) == pytest.approx(stage.eps, abs=1e-12)
        D = update_weights(D, stage.alpha, h, signed)
        assert D.normalizer == pytest.approx(stage.normalizer, rel=1e-12)


def test_algorithm1_alphas_are_positive_and_ignore_learning_rate():
    data = synthetic_task(200, seed=2)
    a = fit_algorithm1(data, BoostParams(15, 2, 0.1))
    b = fit_algorithm1(data, BoostParams(15, 2, 0.7))
    assert a.alphas == b.alphas
    assert all(alpha > 0 for alpha in a.alphas)
    assert all(0 < stage.eps < 0.5 for stage in a.stages)


def test_algorithm1_rejects_non_binary_labels():
    with pytest.raises(TrainingError):
        fit_algorithm1(make_dataset([[0.0], [1.0]], [0, 2]))


def test_initial_score():
    assert initial_score(np.array([0.0, 1.0, 0.0, 1.0])) == 0.0
    assert initial_score(np.array([0.0, 0.0, 0.0, 1.0])) == pytest.approx(math.log(1 / 3))
    with pytest.raises(TrainingError):
        initial_score(np.ones(4))


def test_sigmoid_is_stable_at_extremes():
    values = sigmoid(np.array([-800.0, -31.0, 0.0, 31.0, 800.0]))
    assert np.all(np.isfinite(values))
    assert values[2] == 0.5
    assert values[0] == 0.0 and values[-1] == 1.0
    assert values[1] == pytest.approx(1.0 / (1.0 + math.exp(31.0)), rel=1e-12)


def test_logit_loss_is_monotone():
    data = synthetic_task(500, seed=3)
    e = fit_logit_gbm(data, BoostParams(40, 3, 0.1))
    assert len(e.stages) == 40
    losses = np.array(e.train_loss)
    assert np.all(np.diff(losses) <= 1e-12)

    # loss recomputed from the ensemble itself
    y = data.labels.binary
    for stage, score in enumerate(staged_decision_function(e, data.matrix), start=1):
        assert log_loss(y, score) == pytest.approx(losses[stage - 1], abs=1e-10)


def test_logit_zero_learning_rate_keeps_f0():
    data = synthetic_task(100, seed=4)
    e = fit_logit_gbm(data, BoostParams(5, 2, 0.0))
    scores = decision_function(e, data.matrix.values)
    np.testing.assert_allclose(scores, e.initial_score, atol=0)


def test_logit_single_class():
    with pytest.raises(TrainingError):
        fit_logit_gbm(make_dataset([[0.0], [1.0]], [1, 1]))


def test_decision_function_examples():
    leaf = fit_logit_gbm(synthetic_task(50, seed=5), BoostParams(1, 1, 0.1)).stages[0].tree
    empty = BoostedEnsemble(LOGIT, (), 0.3, 0, 1, 0.1, 4)
    assert decision_function(empty, [1.0, 2.0, 3.0, 4.0]) == 0.3

    stump = leaf.with_values(np.where(leaf.is_leaf, 1.0, leaf.value))
    one = BoostedEnsemble(ALGORITHM1, (BoostStage(tree=stump, alpha=1.0),), 0.0, 1, 1, 0.1, 4)
    assert decision_function(one, [0.0, 0.0, 0.0, 0.0]) == 1.0


def test_decision_function_matches_stage_sum():
    data = synthetic_task(200, seed=6)
    e = fit_logit_gbm(data, BoostParams(12, 3, 0.2))
    X = data.matrix.values
    expected = np.full(len(X), e.initial_score)
    for stage in e.stages:
        expected = expected + stage.alpha * np.array([predict_tree(stage.tree, row) for row in X])
    np.testing.assert_allclose(decision_function(e, X), expected, atol=1e-12)


def test_staged_scores_end_at_decision_function():
    data = synthetic_task(100, seed=7)
    e = fit_logit_gbm(data, BoostParams(6, 2, 0.1))
    staged = list(staged_decision_function(e, data.matrix))
    assert len(staged) == 6
    np.testing.assert_allclose(staged[-1], decision_function(e, data.matrix.values), atol=1e-12)


def test_positive_alpha_rescaling_keeps_predictions():
    data = synthetic_task(200, seed=8)
    e = fit_algorithm1(data, BoostParams(10, 2, 0.1))
    scaled = BoostedEnsemble(
        e.mode,
        tuple(BoostStage(s.tree, s.alpha * 3.7, s.eps, s.normalizer) for s in e.stages),
        0.0, e.n_estimators, e.max_depth, e.learning_rate, e.n_features,
    )
    X = data.matrix.values
    assert np.array_equal(predict_classes(e, X), predict_classes(scaled, X))


def test_predict_labels_and_tie_rule():
    tree = fit_logit_gbm(synthetic_task(50, seed=9), BoostParams(1, 1, 0.1)).stages[0].tree
    zero = tree.with_values(np.zeros(tree.node_count))
    for f0, label in ((2.1, ">50K"), (-0.4, "<=50K"), (0.0, "<=50K")):
        e = BoostedEnsemble(LOGIT, (BoostStage(tree=zero, alpha=0.1),), f0, 1, 1, 0.1, 4)
        assert predict(e, [0.0, 0.0, 0.0, 0.0]) == label


def test_arity_mismatch():
    data = synthetic_task(60, seed=10)
    e = fit_logit_gbm(data, BoostParams(2, 2, 0.1))
    with pytest.raises(TrainingError):
        decision_function(e, [1.0, 2.0])


def test_get_booster():
    assert get_booster("logit").name == LOGIT
    assert get_booster("algorithm1").name == ALGORITHM1
    with pytest.raises(ConfigurationError):
        get_booster("adaboost")
