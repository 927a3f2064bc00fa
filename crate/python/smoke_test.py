"""Smoke test for the betarisk Python extension.

Build and install the extension first:

    pip install maturin
    maturin build --release -m crates/python/Cargo.toml -o dist
    pip install dist/betarisk-*.whl

then run `python python/smoke_test.py`.
"""

import math
import os
import tempfile

import betarisk as br


def close(a, b, tol=1e-12):
    return abs(a - b) <= tol


def check_fusion():
    direct = br.TrustEstimate(0.6844, 0.01)
    indirect = br.TrustEstimate(0.0445)  # default variance
    assert indirect.variance == br.DEFAULT_VARIANCE

    shapes = br.moments_to_beta(direct)
    assert close(shapes.alpha, 14.0984100416, 1e-9), shapes
    assert close(shapes.mean(), 0.6844)

    report = br.fuse(direct, indirect)
    assert close(report.combined, 0.6060471220991707), report
    assert close(report.w_a * 0.6844 + report.w_b * 0.0445, report.combined)
    assert close(br.combined_trust(direct, indirect), report.combined)
    assert close(br.combined_trust(direct, indirect, method="average"), (0.6844 + 0.0445) / 2)

    post = br.posterior_params(br.BetaParams(2, 2), br.BetaParams(2, 2))
    assert (post.alpha, post.beta) == (3.0, 3.0)
    w = br.fusion_weights(br.BetaParams(2, 2), br.BetaParams(2, 2))
    assert close(w.k, 6.0) and close(w.w_a, 2 / 3)

    assert math.isinf(br.beta_pdf(0.5, 0.5, 0.0))
    assert close(br.beta_pdf(1, 1, 0.3), 1.0)


def check_errors():
    try:
        br.TrustEstimate(0.5, 0.3)
        br.moments_to_beta(br.TrustEstimate(0.5, 0.3))
    except br.InvalidVarianceError as e:
        assert "invalid variance" in str(e)
    else:
        raise AssertionError("variance 0.3 at mean 0.5 should be rejected")

    try:
        br.combined_trust(br.TrustEstimate(0.02, 0.01), br.TrustEstimate(0.02, 0.01))
    except br.DegeneratePosteriorError:
        pass
    else:
        raise AssertionError("expected a degenerate posterior")

    try:
        br.TrustEstimate(1.5)
    except br.OutOfRangeError:
        pass
    else:
        raise AssertionError("mean 1.5 should be out of range")

    assert issubclass(br.InvalidVarianceError, br.BetaRiskError)
    assert issubclass(br.BetaRiskError, ValueError)


def check_decisions():
    rec = br.evaluate_request(0.4546, br.TrustEstimate(0.5133), br.TrustEstimate(0.7578))
    assert rec.decision == "AcceptDirect" and rec.combined is None and rec.risk == 0.0

    rec = br.evaluate_request(0.7148, br.TrustEstimate(0.6844), br.TrustEstimate(0.0445), appetite=1.0)
    assert rec.decision == "AcceptWithRisk", rec
    assert close(rec.risk, 0.10875287790082929)

    declined = br.update_record(rec, appetite=0.0, direct=br.TrustEstimate(0.6844))
    assert declined.decision == "Decline" and not declined.accepted

    own = br.self_record()
    assert (own.required, own.combined, own.risk) == (0.0, 1.0, 0.0)
    assert close(br.risk_value(0.7148, 0.4284), 0.2864)


def check_network():
    fixture = br.Network.fixture_three_node()
    result = br.run_assessment(fixture)
    assert result.labels == [1, 2, 3]
    assert result.decision(0, 1) == "AcceptDirect"
    assert result.decision(1, 0) == "AcceptIndirect"
    assert close(result.c[0][2], 0.6060471220991707)
    assert close(result.r[2][0], 0.12409290213581057)
    assert [p for p, _ in result.risk_series(0)] == [1, 2]
    assert "[R]" in result.render_matrices(["fixture"])

    config = br.ScenarioConfig.fifteen_node()
    assert config.seed == br.FIFTEEN_NODE_SEED
    net = br.generate_network(config)
    again = br.Network.generate(br.ScenarioConfig())
    assert net == again
    first, second = br.run_assessment(net), br.run_assessment(again)
    assert first.c == second.c and first.r == second.r
    assert all(len(first.risk_series(i)) == 14 for i in range(15))
    assert first.summary()["edges"] == net.edge_count

    with tempfile.TemporaryDirectory() as tmp:
        path = os.path.join(tmp, "net.json")
        net.save(path)
        assert br.Network.load(path) == net

    custom = br.Network(2, labels=[10, 20])
    custom.set_edge(1, 0, 0.3, br.TrustEstimate(0.2), br.TrustEstimate(0.25))
    assert br.Network.from_json(custom.to_json()) == custom
    try:
        custom.set_edge(0, 0, 0.3, br.TrustEstimate(0.2), br.TrustEstimate(0.25))
    except br.NetworkError:
        pass
    else:
        raise AssertionError("self edge should be rejected")


def main():
    check_fusion()
    check_errors()
    check_decisions()
    check_network()
    print("betarisk smoke test passed")


if __name__ == "__main__":
    main()
