#include "evacast/models/recurrent.hpp"

#include "evacast/core/error.hpp"

namespace evacast::models {

namespace {

using Eigen::Index;

void sigmoid_inplace(Eigen::Ref<Matrix> m) { m = (1.0 + (-m.array()).exp()).inverse().matrix(); }

// Rows [t*B, (t+1)*B) of a time-stacked matrix.
auto block_rows(Matrix& m, std::size_t t, Index b) { return m.middleRows(static_cast<Index>(t) * b, b); }
auto block_rows(const Matrix& m, std::size_t t, Index b) { return m.middleRows(static_cast<Index>(t) * b, b); }

} // namespace

std::string to_string(CellType c) { return c == CellType::Lstm ? "lstm" : "rnn"; }

CellType parse_cell_type(const std::string& s) {
    if (s == "lstm") return CellType::Lstm;
    if (s == "rnn") return CellType::Rnn;
    throw ValidationError("unknown sequence model type: " + s);
}

LstmState lstm_cell_step(const LstmCellParams& p, const Matrix& x, const Matrix& h_prev, const Matrix& c_prev) {
    const Index H = p.wh.rows();
    if (p.wh.cols() != 4 * H || p.wx.cols() != 4 * H || p.b.cols() != 4 * H || x.cols() != p.wx.rows() ||
        h_prev.cols() != H || c_prev.cols() != H || h_prev.rows() != x.rows() || c_prev.rows() != x.rows())
        throw ValidationError("lstm_cell_step: shape mismatch");
    Matrix z = x * p.wx + h_prev * p.wh;
    z.rowwise() += p.b;
    sigmoid_inplace(z.leftCols(2 * H));
    sigmoid_inplace(z.rightCols(H));
    z.middleCols(2 * H, H) = z.middleCols(2 * H, H).array().tanh().matrix();
    LstmState s;
    s.c = z.middleCols(H, H).cwiseProduct(c_prev) + z.leftCols(H).cwiseProduct(z.middleCols(2 * H, H));
    s.h = z.rightCols(H).cwiseProduct(s.c.array().tanh().matrix());
    return s;
}

struct SequenceModel::Cache {
    // Per layer, time-stacked (T*B rows).
    std::vector<Matrix> input;   // layer input after dropout
    std::vector<Matrix> act;     // activated gates (LSTM) or h (RNN)
    std::vector<Matrix> c;       // LSTM cell state
    std::vector<Matrix> tc;      // tanh(c)
    std::vector<Matrix> h;       // layer outputs
    std::vector<Matrix> mask;    // dropout on this layer's outputs (empty when inactive)
    Matrix head_mask;
    Matrix head_in;
};

SequenceModel::SequenceModel(const SequenceShape& shape, std::uint64_t seed) : shape_(shape) {
    if (shape.input_dim == 0 || shape.hidden == 0 || shape.layers == 0)
        throw ValidationError("sequence model: sizes must be > 0");
    if (!(shape.dropout >= 0.0 && shape.dropout < 1.0)) throw ValidationError("dropout must lie in [0, 1)");
    Rng rng(derive_seed(seed, 0x726e6e));
    const auto H = static_cast<Index>(shape.hidden);
    const auto G = static_cast<Index>(shape.gates());
    for (std::size_t l = 0; l < shape.layers; ++l) {
        const auto D = static_cast<Index>(l == 0 ? shape.input_dim : shape.hidden);
        const std::string s = std::to_string(l);
        wx_.emplace_back("Wx" + s, D, G * H);
        wh_.emplace_back("Wh" + s, H, G * H);
        b_.emplace_back("b" + s, 1, G * H);
        glorot_uniform(wx_.back().value, static_cast<double>(D), static_cast<double>(G * H), rng);
        glorot_uniform(wh_.back().value, static_cast<double>(H), static_cast<double>(G * H), rng);
        if (shape.cell == CellType::Lstm) b_.back().value.middleCols(H, H).setOnes(); // forget bias 1
    }
    head_w_ = Parameter("head_W", H, 1);
    head_b_ = Parameter("head_b", 1, 1);
    glorot_uniform(head_w_.value, static_cast<double>(H), 1.0, rng);
}

void SequenceModel::check(const SequenceBatch& xs) const {
    if (wx_.empty()) throw ValidationError("sequence model is not initialized");
    if (xs.empty()) throw ValidationError("sequence must have at least one step");
    const Index B = xs[0].rows();
    for (const auto& x : xs)
        if (static_cast<std::size_t>(x.cols()) != shape_.input_dim || x.rows() != B)
            throw ValidationError("sequence step width " + std::to_string(x.cols()) + " does not match " +
                                  std::to_string(shape_.input_dim));
}

Vector SequenceModel::run(const SequenceBatch& xs, bool dropout_active, Rng* rng, Cache* cache,
                          std::vector<Matrix>* last_hidden) const {
    check(xs);
    const bool drop = dropout_active && shape_.dropout > 0.0;
    if (drop && rng == nullptr) throw ValidationError("dropout requires an rng");
    const std::size_t T = xs.size();
    const Index B = xs[0].rows();
    const auto H = static_cast<Index>(shape_.hidden);
    const bool lstm = shape_.cell == CellType::Lstm;

    Matrix input(static_cast<Index>(T) * B, static_cast<Index>(shape_.input_dim));
    for (std::size_t t = 0; t < T; ++t) block_rows(input, t, B) = xs[t];

    if (cache) *cache = Cache{};
    Matrix h_last;
    for (std::size_t l = 0; l < shape_.layers; ++l) {
        Matrix z = input * wx_[l].value; // input contribution for all steps at once
        z.rowwise() += b_[l].value.row(0);
        Matrix hs(static_cast<Index>(T) * B, H);
        Matrix cs, tcs;
        if (lstm) {
            cs.resize(static_cast<Index>(T) * B, H);
            tcs.resize(static_cast<Index>(T) * B, H);
        }
        Matrix h = Matrix::Zero(B, H), c = Matrix::Zero(B, H);
        for (std::size_t t = 0; t < T; ++t) {
            auto zt = block_rows(z, t, B);
            zt.noalias() += h * wh_[l].value;
            if (lstm) {
                sigmoid_inplace(zt.leftCols(2 * H));
                sigmoid_inplace(zt.rightCols(H));
                zt.middleCols(2 * H, H) = zt.middleCols(2 * H, H).array().tanh().matrix();
                c = zt.middleCols(H, H).cwiseProduct(c) + zt.leftCols(H).cwiseProduct(zt.middleCols(2 * H, H));
                auto tc = block_rows(tcs, t, B);
                tc = c.array().tanh().matrix();
                h = zt.rightCols(H).cwiseProduct(tc);
                block_rows(cs, t, B) = c;
            } else {
                zt = zt.array().tanh().matrix();
                h = zt;
            }
            block_rows(hs, t, B) = h;
        }
        if (last_hidden) last_hidden->push_back(h);
        h_last = h;

        Matrix mask;
        const bool last_layer = l + 1 == shape_.layers;
        if (drop && !last_layer) {
            mask = dropout_mask(static_cast<Index>(T) * B, H, shape_.dropout, *rng);
        }
        if (cache) {
            cache->input.push_back(std::move(input));
            cache->act.push_back(std::move(z));
            cache->c.push_back(std::move(cs));
            cache->tc.push_back(std::move(tcs));
            cache->h.push_back(hs);
            cache->mask.push_back(mask);
        }
        if (!last_layer) input = drop ? Matrix(hs.cwiseProduct(mask)) : std::move(hs);
    }

    Matrix head_in = h_last;
    Matrix head_mask;
    if (drop) {
        head_mask = dropout_mask(B, H, shape_.dropout, *rng);
        head_in = head_in.cwiseProduct(head_mask);
    }
    Vector y = head_in * head_w_.value.col(0);
    y.array() += head_b_.value(0, 0);
    if (cache) {
        cache->head_mask = std::move(head_mask);
        cache->head_in = std::move(head_in);
    }
    return y;
}

Vector SequenceModel::forward(const SequenceBatch& xs, bool dropout_active, Rng* rng) const {
    return run(xs, dropout_active, rng, nullptr, nullptr);
}

std::vector<Matrix> SequenceModel::layer_last_hidden(const SequenceBatch& xs, bool dropout_active, Rng* rng) const {
    std::vector<Matrix> out;
    run(xs, dropout_active, rng, nullptr, &out);
    return out;
}

double SequenceModel::loss(const SequenceBatch& xs, const Vector& y, bool dropout_active, Rng* rng) const {
    const Vector p = run(xs, dropout_active, rng, nullptr, nullptr);
    if (p.size() != y.size()) throw ValidationError("target count does not match batch size");
    return (p - y).squaredNorm() / static_cast<double>(y.size());
}

double SequenceModel::loss_and_grad(const SequenceBatch& xs, const Vector& y, Rng* rng) {
    Cache cache;
    const Vector p = run(xs, rng != nullptr, rng, &cache, nullptr);
    if (p.size() != y.size()) throw ValidationError("target count does not match batch size");
    const Index B = p.size();
    const std::size_t T = xs.size();
    const auto H = static_cast<Index>(shape_.hidden);
    const bool lstm = shape_.cell == CellType::Lstm;
    const Vector diff = p - y;
    const double loss = diff.squaredNorm() / static_cast<double>(B);

    const Vector dy = diff * (2.0 / static_cast<double>(B));
    head_w_.grad.col(0) = cache.head_in.transpose() * dy;
    head_b_.grad(0, 0) = dy.sum();
    Matrix dh_top = dy * head_w_.value.col(0).transpose(); // B x H
    if (cache.head_mask.size() > 0) dh_top = dh_top.cwiseProduct(cache.head_mask);

    // Gradient flowing into each layer's outputs, time-stacked; the top layer only receives it at the last step.
    Matrix dout = Matrix::Zero(static_cast<Index>(T) * B, H);
    block_rows(dout, T - 1, B) = dh_top;

    for (std::size_t l = shape_.layers; l-- > 0;) {
        const Matrix& act = cache.act[l];
        const Matrix& hs = cache.h[l];
        Matrix dz(act.rows(), act.cols());
        Matrix dh_next = Matrix::Zero(B, H), dc_next = Matrix::Zero(B, H);
        for (std::size_t t = T; t-- > 0;) {
            const Matrix dh = block_rows(dout, t, B) + dh_next;
            auto g = block_rows(act, t, B);
            auto dzt = block_rows(dz, t, B);
            if (lstm) {
                const auto ig = g.leftCols(H).array();
                const auto fg = g.middleCols(H, H).array();
                const auto gg = g.middleCols(2 * H, H).array();
                const auto og = g.rightCols(H).array();
                const auto tc = block_rows(cache.tc[l], t, B).array();
                const Matrix dc = (dh.array() * og * (1.0 - tc.square())).matrix() + dc_next;
                dzt.rightCols(H) = (dh.array() * tc * og * (1.0 - og)).matrix();
                dzt.leftCols(H) = (dc.array() * gg * ig * (1.0 - ig)).matrix();
                dzt.middleCols(2 * H, H) = (dc.array() * ig * (1.0 - gg.square())).matrix();
                if (t > 0) {
                    const auto cprev = block_rows(cache.c[l], t - 1, B).array();
                    dzt.middleCols(H, H) = (dc.array() * cprev * fg * (1.0 - fg)).matrix();
                } else {
                    dzt.middleCols(H, H).setZero();
                }
                dc_next = (dc.array() * fg).matrix();
            } else {
                dzt = (dh.array() * (1.0 - g.array().square())).matrix();
            }
            dh_next.noalias() = dzt * wh_[l].value.transpose();
        }
        // h_{t-1} stacked, zero at t = 0.
        Matrix hprev = Matrix::Zero(hs.rows(), H);
        if (T > 1) hprev.bottomRows(static_cast<Index>(T - 1) * B) = hs.topRows(static_cast<Index>(T - 1) * B);
        wh_[l].grad.noalias() = hprev.transpose() * dz;
        wx_[l].grad.noalias() = cache.input[l].transpose() * dz;
        b_[l].grad = dz.colwise().sum();
        if (l > 0) {
            dout.noalias() = dz * wx_[l].value.transpose();
            if (cache.mask[l - 1].size() > 0) dout = dout.cwiseProduct(cache.mask[l - 1]);
        }
    }
    return loss;
}

ParameterList SequenceModel::parameters() {
    ParameterList out;
    for (std::size_t l = 0; l < wx_.size(); ++l) {
        out.push_back(&wx_[l]);
        out.push_back(&wh_[l]);
        out.push_back(&b_[l]);
    }
    out.push_back(&head_w_);
    out.push_back(&head_b_);
    return out;
}

std::vector<const Parameter*> SequenceModel::parameters() const {
    std::vector<const Parameter*> out;
    for (std::size_t l = 0; l < wx_.size(); ++l) {
        out.push_back(&wx_[l]);
        out.push_back(&wh_[l]);
        out.push_back(&b_[l]);
    }
    out.push_back(&head_w_);
    out.push_back(&head_b_);
    return out;
}

} // namespace evacast::models
