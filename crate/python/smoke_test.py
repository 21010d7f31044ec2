"""Quick check of the qcx extension module.

Build and install first:
    pip install maturin
    maturin develop --release -m crates/py/Cargo.toml
"""

import qcx


def main():
    saddle = qcx.Field("-x1^2", 2)
    report = qcx.classify(saddle)
    assert report["q_index"] == 1, report["q_index"]

    bowl = qcx.Field("-x1^2-x2^2", 2)
    assert qcx.witness(bowl, 1)["witness"] is not None
    assert qcx.witness(saddle, 1)["witness"] is None

    punctured = qcx.OpenSet('{"punctured_axis": 1, "dim": 2}')
    assert punctured.contains([0.5, 0.0]) and not punctured.contains([0.0, 0.3])
    assert abs(punctured.distance([0.25, 0.7]) - 0.25) < 1e-12
    assert qcx.set_check(punctured, 0)["verdict"] == "consistent"

    re, im, negatives = qcx.levi(qcx.Field("x1^2+y1^2", 1, complex=True), [0.3, -0.2])
    assert abs(re[0][0] - 1.0) < 1e-6 and abs(im[0][0]) < 1e-9 and negatives == 0

    tube = qcx.tube(qcx.OpenSet('{"punctured_axis": 1, "dim": 1}'), 0, a=1.0)
    assert tube["agree"] and tube["q_pseudoconvex"]

    rh = qcx.reinhardt(qcx.Field("-x1^2", 1))
    assert rh["fraction"] >= 0.95

    demo = qcx.graph_demo(["-x1^2"], [-1.0], [1.0])
    assert demo["verdict"] == "violated", demo["verdict"]

    try:
        qcx.Field("x1 +", 1)
    except ValueError:
        pass
    else:
        raise AssertionError("syntax error not raised")

    print("qcx", qcx.__version__, "smoke test passed")


if __name__ == "__main__":
    main()
