"""The four-point stall story.

Four well-separated points, four classes, one tiny dense net. The softmax
baseline fits them in a handful of epochs. The evidential loss under ReLU
can drive every logit of a sample negative early in training; from then on
that sample's gradient is exactly zero and accuracy pins below 100% forever.
The vacuity-weighted correct-evidence term (with the exp activation)
restores the learning signal and the same net fits all four points again.
"""

from evidkit import ExperimentConfig, run_experiment


def config(variant: str) -> ExperimentConfig:
    doc = {
        "name": f"toy-{variant}",
        "train_data": {"kind": "toy4", "d": 2, "seed": 0},
        "hidden_dims": [16],
        "optimizer": {"kind": "sgd_momentum", "lr": 0.05},
        "epochs": 200,
        "batch_size": 4,
        "seed": 0,
        "zero_ev_taus": [0.0, 0.01, 0.1, 1.0],
    }
    if variant == "softmax":
        doc.update({"loss": "softmax_ce", "activation": "relu"})
    elif variant == "evidential-relu":
        doc.update({"loss": "ev_mse", "activation": "relu"})
    else:  # evidential-exp + correct-evidence regularizer
        doc.update({"loss": "ev_mse", "activation": "exp", "use_correct_reg": True})
    return ExperimentConfig.from_dict(doc)


def report(variant: str) -> None:
    result = run_experiment(config(variant))
    logs = result.logs
    hit = next((log.epoch for log in logs if log.train_acc == 1.0), None)
    final = logs[-1]
    print(f"\n{variant}:")
    if hit is None:
        print(f"  never reaches 100%: final accuracy {final.train_acc:.0%}")
    else:
        print(f"  reaches 100% at epoch {hit}")
    stuck = [log.zero_ev[0.0] for log in logs[-50:]]
    print(f"  samples at exactly zero evidence, final 50 epochs: min {min(stuck)}, max {max(stuck)}")
    print(f"  final mean vacuity over the train set: {final.mean_vacuity:.3f}")


def main() -> None:
    print("4 points, 4 classes, dense [2 -> 16 -> 4], SGD+momentum lr=0.05, 200 epochs")
    for variant in ("softmax", "evidential-relu", "evidential-exp+correct-reg"):
        report(variant)
    print(
        "\nThe ReLU arm is not slow -- it is stopped: the pinned samples sit in\n"
        "the zero-evidence region where the evidential loss has exactly zero\n"
        "gradient, so no amount of further training moves them."
    )


if __name__ == "__main__":
    main()
