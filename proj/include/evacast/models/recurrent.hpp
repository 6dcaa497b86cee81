#pragma once

#include "evacast/models/tensor.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace evacast::models {

enum class CellType { Lstm, Rnn };

std::string to_string(CellType c);
CellType parse_cell_type(const std::string& s);

struct SequenceShape {
    CellType cell = CellType::Lstm;
    std::size_t input_dim = 15;
    std::size_t hidden = 64;
    std::size_t layers = 2;
    double dropout = 0.5;

    std::size_t gates() const { return cell == CellType::Lstm ? 4 : 1; }
};

// A sequence is T matrices of shape B x input_dim (one row per batch member).
using SequenceBatch = std::vector<Matrix>;

// One LSTM step on a batch. Gate blocks of the 4H columns are ordered
// input, forget, candidate, output.
struct LstmCellParams {
    Matrix wx; // D x 4H
    Matrix wh; // H x 4H
    RowVector b;
};
struct LstmState {
    Matrix h;
    Matrix c;
};
LstmState lstm_cell_step(const LstmCellParams& p, const Matrix& x, const Matrix& h_prev, const Matrix& c_prev);

// Stacked LSTM or tanh RNN with a linear head on the last hidden state.
// Dropout (inverted) is applied to each layer's outputs before the next
// layer and to the last hidden state before the head; never inside the
// recurrence.
class SequenceModel {
public:
    SequenceModel() = default;
    SequenceModel(const SequenceShape& shape, std::uint64_t seed);

    const SequenceShape& shape() const { return shape_; }
    CellType cell() const { return shape_.cell; }
    std::string type_name() const { return to_string(shape_.cell); }

    // Predictions (B). With dropout_active, masks are drawn from rng.
    Vector forward(const SequenceBatch& xs, bool dropout_active = false, Rng* rng = nullptr) const;

    // Last hidden state of every layer, before any dropout on it.
    std::vector<Matrix> layer_last_hidden(const SequenceBatch& xs, bool dropout_active = false,
                                          Rng* rng = nullptr) const;

    // Mean squared error; gradients are overwritten. Dropout is active when rng is given.
    double loss_and_grad(const SequenceBatch& xs, const Vector& y, Rng* rng);
    double loss(const SequenceBatch& xs, const Vector& y, bool dropout_active = false, Rng* rng = nullptr) const;

    ParameterList parameters();
    std::vector<const Parameter*> parameters() const;

    Parameter& wx(std::size_t layer) { return wx_.at(layer); }
    Parameter& wh(std::size_t layer) { return wh_.at(layer); }
    Parameter& bias(std::size_t layer) { return b_.at(layer); }
    Parameter& head_w() { return head_w_; }
    Parameter& head_b() { return head_b_; }

private:
    struct Cache;
    void check(const SequenceBatch& xs) const;
    Vector run(const SequenceBatch& xs, bool dropout_active, Rng* rng, Cache* cache,
               std::vector<Matrix>* last_hidden) const;

    SequenceShape shape_;
    std::vector<Parameter> wx_;
    std::vector<Parameter> wh_;
    std::vector<Parameter> b_;
    Parameter head_w_;
    Parameter head_b_;
};

} // namespace evacast::models
