#include "evacast/core/error.hpp"
#include "evacast/models/adam.hpp"
#include "evacast/models/gradcheck.hpp"
#include "evacast/models/mc_dropout.hpp"
#include "evacast/models/mlp.hpp"
#include "evacast/models/recurrent.hpp"
#include "evacast/models/serialize.hpp"
#include "evacast/models/train.hpp"

#include "fixtures.hpp"

#include <doctest.h>

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

using namespace evacast;
using namespace evacast::models;

namespace {

Matrix random_matrix(Eigen::Index r, Eigen::Index c, std::uint64_t seed) {
    Rng rng(seed);
    Matrix m(r, c);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = 2.0 * uniform01(rng) - 1.0;
    return m;
}

SequenceBatch random_sequence(std::size_t T, Eigen::Index B, Eigen::Index D, std::uint64_t seed) {
    SequenceBatch xs;
    for (std::size_t t = 0; t < T; ++t) xs.push_back(random_matrix(B, D, seed * 100 + t));
    return xs;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

features::NormalizationStats identity_norm(std::size_t d) {
    features::NormalizationStats s;
    s.mean.assign(d, 0.0);
    s.stddev.assign(d, 1.0);
    s.passthrough.assign(d, false);
    return s;
}

} // namespace

TEST_CASE("softmax rows sum to one") {
    const auto p = softmax_rows(random_matrix(20, 3, 1) * 50.0);
    for (Eigen::Index i = 0; i < p.rows(); ++i) CHECK(p.row(i).sum() == doctest::Approx(1.0).epsilon(1e-12));
    Matrix big(1, 3);
    big << 1000.0, 1000.0, -1000.0;
    const auto q = softmax_rows(big);
    CHECK(q(0, 0) == doctest::Approx(0.5));
    CHECK(all_finite(q));
}

TEST_CASE("zero MLP gives uniform probabilities") {
    Mlp m(MlpShape{}, 1);
    for (auto* p : m.parameters()) p->value.setZero();
    const std::vector<double> x(14, 3.0);
    for (const double v : m.predict_proba(x)) CHECK(v == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK_THROWS_AS(mlp_forward(m, std::vector<double>(13, 0.0)), ValidationError);
}

TEST_CASE("toy 2-2-3 MLP forward pass") {
    Mlp m(MlpShape{2, {2}, 3}, 1);
    m.weight(0).value << 0.5, -1.0, 0.25, 0.75;
    m.bias(0).value << 0.1, -0.2;
    m.weight(1).value << 1.0, 2.0, -1.0, 0.5, 0.5, 0.5;
    m.bias(1).value << 0.0, 0.1, 0.2;
    // hidden relu(0.1, -2.7) = (0.1, 0); logits (0.1, 0.3, 0.1)
    const auto p = m.predict_proba(std::vector<double>{1.0, -2.0});
    CHECK(p[0] == doctest::Approx(0.3104237734530056).epsilon(1e-12));
    CHECK(p[1] == doctest::Approx(0.37915245309398876).epsilon(1e-12));
    CHECK(p[2] == doctest::Approx(0.3104237734530056).epsilon(1e-12));
}

TEST_CASE("LSTM cell with zero parameters") {
    LstmCellParams p{Matrix::Zero(2, 4), Matrix::Zero(1, 4), RowVector::Zero(4)};
    Matrix x = Matrix::Constant(1, 2, 0.7);
    Matrix h = Matrix::Constant(1, 1, 0.3);
    Matrix c = Matrix::Constant(1, 1, 0.8);
    auto s = lstm_cell_step(p, x, h, c);
    CHECK(s.c(0, 0) == doctest::Approx(0.4).epsilon(1e-15));
    CHECK(s.h(0, 0) == doctest::Approx(0.5 * std::tanh(0.4)).epsilon(1e-15));
    s = lstm_cell_step(p, x, h, Matrix::Zero(1, 1));
    CHECK(s.h(0, 0) == 0.0);
    CHECK(s.c(0, 0) == 0.0);
}

TEST_CASE("one-unit LSTM cell by hand") {
    LstmCellParams p{Matrix(1, 4), Matrix(1, 4), RowVector(4)};
    p.wx << 0.3, -0.2, 0.8, 0.5;
    p.wh << 0.1, 0.4, -0.3, 0.2;
    p.b << 0.0, 1.0, 0.1, -0.1;
    const auto s = lstm_cell_step(p, Matrix::Constant(1, 1, 0.5), Matrix::Constant(1, 1, 0.1),
                                  Matrix::Constant(1, 1, 0.2));
    CHECK(std::abs(s.h(0, 0) - 0.196925) < 5e-7);
    CHECK(std::abs(s.c(0, 0) - 0.380410) < 5e-7);
}

TEST_CASE("two-step one-unit sequence model by hand") {
    SequenceModel m(SequenceShape{CellType::Lstm, 1, 1, 1, 0.0}, 1);
    m.wx(0).value << 0.3, -0.2, 0.8, 0.5;
    m.wh(0).value << 0.1, 0.4, -0.3, 0.2;
    m.bias(0).value << 0.0, 1.0, 0.1, -0.1;
    m.head_w().value(0, 0) = 1.5;
    m.head_b().value(0, 0) = -0.25;
    const SequenceBatch xs{Matrix::Constant(1, 1, 0.5), Matrix::Constant(1, 1, -1.0)};
    // h1 from zero state, then h2 = -0.027480; output 1.5 h2 - 0.25
    CHECK(m.forward(xs)(0) == doctest::Approx(-0.29122001217613763).epsilon(1e-12));
}

TEST_CASE("sequence model determinism and zero weights") {
    for (const auto cell : {CellType::Lstm, CellType::Rnn}) {
        SequenceModel m(SequenceShape{cell, 3, 8, 2, 0.5}, 4);
        const auto xs = random_sequence(6, 5, 3, 2);
        CHECK(m.forward(xs) == m.forward(xs));
        for (auto* p : m.parameters()) p->value.setZero();
        m.head_b().value(0, 0) = 0.75;
        const auto y = m.forward(xs);
        for (Eigen::Index i = 0; i < y.size(); ++i) CHECK(y(i) == 0.75);
    }
    CHECK_THROWS_AS(SequenceModel(SequenceShape{CellType::Lstm, 3, 8, 2, 1.0}, 1), ValidationError);
    CHECK(parse_cell_type("rnn") == CellType::Rnn);
    CHECK_THROWS_AS(parse_cell_type("gru"), ValidationError);
}

TEST_CASE("dropout masks") {
    Rng rng(3);
    const auto m = dropout_mask(200, 200, 0.3, rng);
    double zeros = 0;
    for (Eigen::Index i = 0; i < m.size(); ++i) {
        const double v = m.data()[i];
        CHECK((v == 0.0 || v == doctest::Approx(1.0 / 0.7)));
        zeros += v == 0.0;
    }
    CHECK(zeros / static_cast<double>(m.size()) == doctest::Approx(0.3).epsilon(0.03));
    CHECK(dropout_mask(3, 3, 0.0, rng) == Matrix::Ones(3, 3));
}

TEST_CASE("gradient check: MLP") {
    Mlp m(MlpShape{14, {64, 64, 64}, 3}, 3);
    const Matrix x = random_matrix(16, 14, 5);
    std::vector<int> y;
    for (int i = 0; i < 16; ++i) y.push_back(i % 3);
    const auto r = gradient_check(m, x, y, 200, 1e-4, 3);
    CHECK(r.n_checked >= 200);
    CHECK(r.max_rel_error <= 1e-4);
}

TEST_CASE("gradient check: LSTM and RNN, with and without dropout") {
    for (const auto cell : {CellType::Lstm, CellType::Rnn})
        for (const bool drop : {false, true}) {
            SequenceModel m(SequenceShape{cell, 4, 8, 2, 0.3}, 7);
            const auto xs = random_sequence(5, 3, 4, 8);
            const Vector y = random_matrix(3, 1, 9).col(0);
            const auto r = gradient_check(m, xs, y, drop, 11, 200, 1e-3, 2);
            INFO(to_string(cell), " dropout ", drop);
            CHECK(r.n_checked >= 200);
            CHECK(r.max_rel_error <= 1e-4);
        }
}

TEST_CASE("gradient check tolerates zero gradients") {
    SequenceModel m(SequenceShape{CellType::Lstm, 2, 3, 1, 0.0}, 1);
    for (auto* p : m.parameters()) p->value.setZero();
    const SequenceBatch xs{Matrix::Zero(2, 2), Matrix::Zero(2, 2)};
    const Vector y = Vector::Zero(2);
    const auto r = gradient_check(m, xs, y);
    CHECK(r.max_rel_error == 0.0);
}

TEST_CASE("gradient check shrinks the step near a kink and skips a kink it cannot avoid") {
    // loss = |u| + v^2 with u sitting at the kink; the probe reports sign(u)
    Parameter u("u", 1, 1), v("v", 1, 1);
    const ParameterList ps{&u, &v};
    const auto loss = [&] { return std::abs(u.value(0)) + v.value(0) * v.value(0); };
    const auto backprop = [&] {
        u.grad(0) = u.value(0) > 0 ? 1.0 : -1.0;
        v.grad(0) = 2.0 * v.value(0);
    };
    const KinkProbe probe = [&] { return std::vector<std::uint8_t>{u.value(0) > 0}; };
    v.value(0) = 0.7;

    u.value(0) = 0.0;
    auto r = gradient_check(ps, loss, backprop, 2, 1e-4, 1, Stencil::Central, probe);
    CHECK(r.n_checked == 1);
    CHECK(r.n_skipped == 1);
    CHECK(r.max_rel_error < 1e-9);

    // 5e-5 from the kink: 1e-4 straddles it, 1e-5 does not
    u.value(0) = 5e-5;
    r = gradient_check(ps, loss, backprop, 2, 1e-4, 1, Stencil::Central, probe);
    CHECK(r.n_checked == 2);
    CHECK(r.n_skipped == 0);
    CHECK(r.max_rel_error < 1e-9);

    // without a probe the straddled kink shows up as an error
    r = gradient_check(ps, loss, backprop, 2, 1e-4, 1);
    CHECK(r.max_rel_error > 0.1);
}

TEST_CASE("Adam configuration") {
    AdamConfig c;
    c.epochs = 0;
    CHECK_THROWS_AS(c.validate(), ValidationError);
    c = {};
    c.learning_rate = -1;
    CHECK_THROWS_AS(c.validate(), ValidationError);
}

TEST_CASE("Adam minimises a quadratic") {
    Parameter p("w", 1, 2);
    p.value << 3.0, -2.0;
    AdamConfig cfg;
    cfg.learning_rate = 0.05;
    Adam opt({&p}, cfg);
    for (int i = 0; i < 2000; ++i) {
        p.grad = 2.0 * p.value; // d/dw |w|^2
        opt.step();
    }
    CHECK(opt.steps() == 2000);
    CHECK(std::abs(p.value(0, 0)) < 1e-3);
    CHECK(std::abs(p.value(0, 1)) < 1e-3);
}

namespace {

// Three well-separated clusters on a line through the plane: linear boundaries suffice.
void separable_toy(Matrix& x, std::vector<int>& y, std::uint64_t seed) {
    Rng rng(seed);
    x.resize(300, 2);
    y.clear();
    for (int i = 0; i < 300; ++i) {
        const int c = i % 3;
        x(i, 0) = 3.0 * c + 0.5 * (uniform01(rng) - 0.5);
        x(i, 1) = -2.0 * c + 0.5 * (uniform01(rng) - 0.5);
        y.push_back(c);
    }
}

} // namespace

TEST_CASE("MLP training fits a separable toy set and is seeded") {
    Matrix x;
    std::vector<int> y;
    separable_toy(x, y, 1);
    AdamConfig cfg;
    cfg.epochs = 150;
    Mlp a(MlpShape{2, {16}, 3}, 5);
    const auto hist = train_classifier(a, x, y, Matrix(0, 2), {}, cfg, 5);
    const auto p = a.forward(x);
    int correct = 0;
    for (Eigen::Index i = 0; i < p.rows(); ++i) {
        Eigen::Index arg;
        p.row(i).maxCoeff(&arg);
        correct += arg == y[static_cast<std::size_t>(i)];
    }
    CHECK(correct >= 297);
    CHECK(hist.epochs_run() == 150);
    CHECK(hist.train_loss.back() < hist.initial_loss);

    Mlp b(MlpShape{2, {16}, 3}, 5);
    train_classifier(b, x, y, Matrix(0, 2), {}, cfg, 5);
    for (std::size_t l = 0; l < a.n_layers(); ++l) CHECK(a.weight(l).value == b.weight(l).value);

    cfg.epochs = 0;
    CHECK_THROWS_AS(train_classifier(b, x, y, x, y, cfg, 5), ValidationError);
}

TEST_CASE("classifier keeps the best validation epoch") {
    Matrix x;
    std::vector<int> y;
    separable_toy(x, y, 2);
    AdamConfig cfg;
    cfg.epochs = 20;
    Mlp m(MlpShape{2, {8}, 3}, 1);
    const auto h = train_classifier(m, x, y, x, y, cfg, 1);
    REQUIRE(h.val_metric.size() == 20);
    const auto best = std::max_element(h.val_metric.begin(), h.val_metric.end()) - h.val_metric.begin();
    CHECK(h.best_epoch == static_cast<std::size_t>(best));
}

TEST_CASE("LSTM learns a noiseless sinusoid") {
    const double amp = 1.0;
    InMemorySequences train(12, 1), val(12, 1);
    for (int s = 0; s < 400; ++s) {
        std::vector<double> seq;
        for (int t = 0; t < 12; ++t) seq.push_back(amp * std::sin(0.3 * (s + t)));
        (s % 5 == 0 ? val : train).add(seq, amp * std::sin(0.3 * (s + 12)));
    }
    AdamConfig cfg;
    cfg.epochs = 60;
    cfg.learning_rate = 0.01;
    cfg.batch_size = 32;
    SequenceModel m(SequenceShape{CellType::Lstm, 1, 16, 1, 0.0}, 2);
    const auto h = train_regressor(m, train, val, cfg, 2);
    CHECK(h.val_metric[h.best_epoch] < 0.05 * amp);

    SequenceModel again(SequenceShape{CellType::Lstm, 1, 16, 1, 0.0}, 2);
    cfg.epochs = 3;
    SequenceModel once(SequenceShape{CellType::Lstm, 1, 16, 1, 0.0}, 2);
    train_regressor(again, train, val, cfg, 9);
    train_regressor(once, train, val, cfg, 9);
    CHECK(again.wx(0).value == once.wx(0).value);
    CHECK(predict_sequences(again, val) == predict_sequences(once, val));
}

TEST_CASE("indexed sequence views") {
    InMemorySequences base(2, 1);
    base.add(std::vector<double>{1, 2}, 10);
    base.add(std::vector<double>{3, 4}, 20);
    IndexedSequences view(base, {1, 1, 0});
    CHECK(view.size() == 3);
    SequenceBatch xs;
    Vector y;
    const std::vector<std::size_t> idx{0, 2};
    view.fill(idx, xs, &y);
    CHECK(y(0) == 20);
    CHECK(y(1) == 10);
    CHECK(xs[1](0, 0) == 4);
    CHECK(xs[0](1, 0) == 1);
    CHECK_THROWS_AS(base.add(std::vector<double>{1}, 0), ValidationError);
}

TEST_CASE("MC dropout") {
    const auto seq = random_sequence(6, 1, 3, 4);
    SequenceModel zero(SequenceShape{CellType::Lstm, 3, 8, 2, 0.0}, 1);
    const auto z = mc_dropout_predict(zero, seq, 30, 1);
    CHECK(z.std == 0.0);
    CHECK(z.ci95_low == z.mean);
    CHECK(z.ci95_high == z.mean);
    CHECK(z.mean == zero.forward(seq)(0));

    SequenceModel m(SequenceShape{CellType::Lstm, 3, 8, 2, 0.3}, 1);
    const auto a = mc_dropout_predict(m, seq, 50, 7, 10.0, 50.0);
    const auto b = mc_dropout_predict(m, seq, 50, 7, 10.0, 50.0);
    CHECK(a.mean == b.mean);
    CHECK(a.ci95_low == b.ci95_low);
    CHECK(a.std > 0.0);
    CHECK(std::abs(a.ci95_low - (a.mean - kZ95 * a.std)) <= 1e-12);
    CHECK(std::abs(a.ci95_high - (a.mean + kZ95 * a.std)) <= 1e-12);
    CHECK_THROWS_AS(mc_dropout_predict(m, seq, 1, 7), ValidationError);
    CHECK_THROWS_AS(mc_dropout_predict(m, random_sequence(6, 2, 3, 4), 10, 7), ValidationError);
}

TEST_CASE("model files are bit-exact and canonical") {
    testing::TempDir dir("models");
    MlpArtifact a{Mlp(MlpShape{}, 9), identity_norm(14), features::longterm_feature_names(), {{"note", "x"}}};
    a.normalization.mean[5] = 0.1 + 0.2; // not representable in short decimal
    save_model(a, dir / "a.json");
    auto b = load_mlp(dir / "a.json");
    save_model(b, dir / "b.json");
    CHECK(slurp(dir / "a.json") == slurp(dir / "b.json"));
    for (std::size_t l = 0; l < a.model.n_layers(); ++l) {
        CHECK(a.model.weight(l).value == b.model.weight(l).value);
        CHECK(a.model.bias(l).value == b.model.bias(l).value);
    }
    CHECK(b.normalization.mean == a.normalization.mean);
    const Matrix x = random_matrix(5, 14, 1);
    CHECK(a.model.forward(x) == b.model.forward(x));

    SequenceArtifact s{SequenceModel(SequenceShape{CellType::Rnn, 15, 8, 1, 0.5}, 2),
                       identity_norm(15), features::shortterm_step_names(), 3, 24, {}};
    save_model(s, dir / "s.json");
    const auto t = load_sequence_model(dir / "s.json");
    save_model(t, dir / "t.json");
    CHECK(slurp(dir / "s.json") == slurp(dir / "t.json"));
    CHECK(t.horizon_h == 3);
    CHECK(t.model.cell() == CellType::Rnn);
    const auto xs = random_sequence(24, 4, 15, 3);
    CHECK(s.model.forward(xs) == t.model.forward(xs));

    CHECK(model_type_of(read_model_json(dir / "a.json")) == "mlp");
    CHECK_THROWS_AS(load_sequence_model(dir / "a.json"), ValidationError);
}

TEST_CASE("future model formats are rejected") {
    MlpArtifact a{Mlp(MlpShape{}, 9), identity_norm(14), features::longterm_feature_names(), {}};
    auto j = to_json(a);
    j["format_version"] = kModelFormatVersion + 1;
    CHECK_THROWS_AS(mlp_from_json(j), IncompatibleVersionError);
    j = to_json(a);
    j["parameters"].clear();
    CHECK_THROWS_AS(mlp_from_json(j), ParseError);
}
