// Masked losses on one batch, a short robust training run, and a decision
// cutoff from the trained classifier's logits.

#include <cstdio>
#include <vector>

#include "zloss/zloss.hpp"

int main() {
    using namespace zloss;

    const std::vector<double> targets{0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 100};
    const std::vector<double> preds(targets.size(), 0.5);
    const auto r = z_mse_loss(preds, targets, 2.0);
    std::printf("z-mse: loss %.4f, %zu of %zu samples kept\n", r.loss, r.valid_count, targets.size());

    const auto reg = gen_regression(2000, 4, 0.1, 6.0, 1.0, 7);
    TrainConfig cfg;
    cfg.epochs = 60;
    cfg.batch_size = 128;
    cfg.learning_rate = 0.02;
    cfg.mask_mode = MaskMode::error_z;
    cfg.schedule = SigmaSchedule{10.0, 2.0, 20};
    for (LossKind loss : {LossKind::mse, LossKind::zmse}) {
        cfg.loss = loss;
        const auto result = train(reg, cfg);
        std::printf("%-4s slope error %.4f, masked in last epoch %zu\n", loss == LossKind::mse ? "mse" : "zmse",
                    result.history.back().model_metric, result.history.back().masked_out_count);
    }

    const auto cls = gen_classification(2000, 2, 0.1, 4.0, 7);
    TrainConfig ccfg;
    ccfg.model = ModelKind::logistic;
    ccfg.loss = LossKind::zbce;
    ccfg.epochs = 30;
    const auto trained = train(cls, ccfg);
    const auto logits = predict(trained.model, cls.x);
    const auto cut = optimal_logit_cutoff(logits, cls.label);
    const auto skew = optimal_prob_cutoff_skewnorm(logits, cls.label);
    std::printf("balanced accuracy %.4f, logit cutoff %.4f (p=%.4f), skew-normal p cutoff %.4f\n",
                trained.history.back().model_metric, *cut.logit_cutoff, cut.prob_cutoff, skew.prob_cutoff);

    const auto report = detect_with_model(trained.model, cls, 1.5);
    std::printf("mislabel detection from logits: precision %.3f recall %.3f f1 %.3f\n", report.precision,
                report.recall, report.f1);
}
