// Copyright 2026 The dcsr Authors
// SPDX-License-Identifier: Apache-2.0

#include "dcsr/kernels.hpp"

#include <algorithm>
#include <exception>
#include <limits>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "dcsr/error.hpp"

namespace dcsr {
namespace {

using Span8 = std::span<const std::int8_t>;

Span8 row_span(const DenseMatrixI8& a, Eigen::Index p) {
  return {a.data() + p * a.cols(), static_cast<std::size_t>(a.cols())};
}

std::int32_t to_i32(std::int64_t v) {
  if (v < std::numeric_limits<std::int32_t>::min() ||
      v > std::numeric_limits<std::int32_t>::max()) {
    throw EngineFault("output accumulator leaves the 32-bit range");
  }
  return static_cast<std::int32_t>(v);
}

// sum w*x - zp * sum w + bias, with the zero point folded in once per row.
std::int32_t finish(std::int32_t dot, std::int32_t weight_sum,
                    std::int32_t x_zero_point, std::int32_t bias) {
  return to_i32(std::int64_t{dot} -
                std::int64_t{x_zero_point} * std::int64_t{weight_sum} +
                std::int64_t{bias});
}

std::int32_t bias_at(const VectorI32& bias, std::size_t r) {
  return bias.size() == 0 ? 0 : bias(static_cast<Eigen::Index>(r));
}

void check_bias(const VectorI32& bias, std::size_t rows) {
  if (bias.size() != 0 && static_cast<std::size_t>(bias.size()) != rows) {
    throw InvalidArgument("bias length must equal the number of weight rows");
  }
}

void check_activations(std::size_t cols, Eigen::Index got) {
  if (static_cast<std::size_t>(got) != cols) {
    throw InvalidArgument("activation length " + std::to_string(got) +
                          " does not match weight columns " +
                          std::to_string(cols));
  }
}

// Splits [0, rows) over worker engines of the same width; counters are
// summed back into `engine`.
template <typename Fn>
void for_row_ranges(std::size_t rows, std::size_t threads, VectorEngine& engine,
                    Fn&& fn) {
  threads = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(rows, 1));
  if (threads == 1) {
    fn(std::size_t{0}, rows, engine);
    return;
  }
  std::vector<VectorEngine> engines(threads, VectorEngine(engine.lanes()));
  std::vector<std::exception_ptr> errors(threads);
  {
    std::vector<std::jthread> workers;
    const std::size_t chunk = (rows + threads - 1) / threads;
    for (std::size_t t = 0; t < threads; ++t) {
      const std::size_t begin = std::min(rows, t * chunk);
      const std::size_t end = std::min(rows, begin + chunk);
      workers.emplace_back([&, t, begin, end] {
        try {
          fn(begin, end, engines[t]);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  for (auto& e : engines) engine.counters() += e.counters();
}

// One vector run of a relative-indexing row.
struct GatherRun {
  std::int64_t base = 0;
  LaneVector offsets;
  Predicate active;
  std::size_t element_begin = 0;
};

// Scalar cumulative-sum extraction of one RI row, cut into runs of at most g
// lanes whose offsets fit 8 bits.
std::vector<GatherRun> extract_ri_row(const RiMatrix& ri, std::size_t r,
                                      VectorEngine& engine) {
  const std::size_t g = engine.lanes();
  std::vector<GatherRun> runs;
  std::uint32_t column = 0;
  std::vector<std::uint8_t> lane_offsets;
  GatherRun run;
  auto flush = [&] {
    if (lane_offsets.empty()) return;
    run.offsets = engine.transfer(lane_offsets);
    run.active = engine.first(lane_offsets.size());
    runs.push_back(run);
    lane_offsets.clear();
  };
  for (std::size_t k = ri.row_ptr[r]; k < ri.row_ptr[r + 1]; ++k) {
    column += unpack_bits(ri.deltas, ri.delta_bits, k);
    if (!lane_offsets.empty() &&
        (lane_offsets.size() == g || column - run.base > 255)) {
      flush();
    }
    if (lane_offsets.empty()) {
      run.base = column;
      run.element_begin = k;
    }
    lane_offsets.push_back(static_cast<std::uint8_t>(column - run.base));
  }
  flush();
  return runs;
}

}  // namespace

void RequantSpec::validate() const {
  if (multiplier <= 0) throw InvalidArgument("requant multiplier must be > 0");
  if (shift > 31) throw InvalidArgument("requant shift must be <= 31");
}

std::int8_t requantize(std::int32_t acc, const RequantSpec& spec) {
  spec.validate();
  const std::int64_t prod = std::int64_t{acc} * spec.multiplier;
  std::int64_t scaled = prod;
  if (spec.shift > 0) {
    const std::int64_t half = std::int64_t{1} << (spec.shift - 1);
    scaled = prod >= 0 ? (prod + half) >> spec.shift
                       : -((-prod + half) >> spec.shift);
  }
  const std::int64_t out = std::clamp<std::int64_t>(
      scaled + spec.output_zero_point, -128, 127);
  return static_cast<std::int8_t>(out);
}

VectorI32 dense_spmv(const DenseMatrixI8& w, const VectorI8& x,
                     std::int32_t x_zero_point, const VectorI32& bias) {
  check_activations(static_cast<std::size_t>(w.cols()), x.size());
  check_bias(bias, static_cast<std::size_t>(w.rows()));
  const Vector<std::int64_t> shifted =
      (x.cast<std::int64_t>().array() - std::int64_t{x_zero_point}).matrix();
  Vector<std::int64_t> y = w.cast<std::int64_t>() * shifted;
  if (bias.size() != 0) y += bias.cast<std::int64_t>();
  return y.unaryExpr([](std::int64_t v) { return to_i32(v); });
}

MatrixI32 dense_spmm(const DenseMatrixI8& w, const DenseMatrixI8& a,
                     std::int32_t x_zero_point, const VectorI32& bias) {
  check_activations(static_cast<std::size_t>(w.cols()), a.cols());
  check_bias(bias, static_cast<std::size_t>(w.rows()));
  const RowMajorMatrix<std::int64_t> shifted =
      (a.cast<std::int64_t>().array() - std::int64_t{x_zero_point}).matrix();
  RowMajorMatrix<std::int64_t> y = shifted * w.cast<std::int64_t>().transpose();
  if (bias.size() != 0) y.rowwise() += bias.cast<std::int64_t>().transpose();
  return y.unaryExpr([](std::int64_t v) { return to_i32(v); });
}

MatrixI32 dense_spmm(const DenseMatrixI8& w, const DenseMatrixI8& a,
                     std::int32_t x_zero_point, const VectorI32& bias,
                     VectorEngine& engine, std::size_t threads) {
  check_activations(static_cast<std::size_t>(w.cols()), a.cols());
  check_bias(bias, static_cast<std::size_t>(w.rows()));
  const std::size_t cols = static_cast<std::size_t>(w.cols());
  const std::size_t g = engine.lanes();
  MatrixI32 out(a.rows(), w.rows());
  for_row_ranges(static_cast<std::size_t>(w.rows()), threads, engine,
                 [&](std::size_t begin, std::size_t end, VectorEngine& eng) {
    for (std::size_t r = begin; r < end; ++r) {
      const Span8 weights = row_span(w, static_cast<Eigen::Index>(r));
      std::int32_t weight_sum = 0;
      for (std::size_t k = 0; k < cols; k += g) {
        const Predicate act = eng.first(cols - k);
        weight_sum = eng.sum_acc_i32(eng.load(weights.subspan(k), act), act,
                                     weight_sum);
      }
      for (Eigen::Index p = 0; p < a.rows(); ++p) {
        const Span8 act_row = row_span(a, p);
        std::int32_t acc = 0;
        for (std::size_t k = 0; k < cols; k += g) {
          const Predicate act = eng.first(cols - k);
          acc = eng.dot_acc_i32(eng.load(weights.subspan(k), act),
                                eng.load(act_row.subspan(k), act), act, acc);
        }
        out(p, static_cast<Eigen::Index>(r)) =
            finish(acc, weight_sum, x_zero_point, bias_at(bias, r));
      }
    }
  });
  return out;
}

VectorI32 dcsr_spmv(const DcsrMatrix& w, const VectorI8& x,
                    std::int32_t x_zero_point, const VectorI32& bias,
                    VectorEngine& engine, std::size_t threads) {
  validate(w);
  check_activations(w.cols, x.size());
  check_bias(bias, w.rows);
  const RowIndex index = build_row_index(w);
  const Span8 xs(x.data(), static_cast<std::size_t>(x.size()));
  const Span8 values(w.values);
  VectorI32 y(w.rows);
  for_row_ranges(w.rows, threads, engine,
                 [&](std::size_t begin, std::size_t end, VectorEngine& eng) {
    for (std::size_t r = begin; r < end; ++r) {
      RowGroupDecoder decoder(w, index, r, eng);
      DecodedGroup grp;
      std::int32_t acc = 0, weight_sum = 0;
      while (decoder.next(grp)) {
        const LaneVector wv = eng.load(values.subspan(grp.element_begin), grp.active);
        const LaneVector xv = eng.gather_i8(xs, grp.base, grp.offsets, grp.active);
        acc = eng.dot_acc_i32(wv, xv, grp.active, acc);
        weight_sum = eng.sum_acc_i32(wv, grp.active, weight_sum);
      }
      y(static_cast<Eigen::Index>(r)) =
          finish(acc, weight_sum, x_zero_point, bias_at(bias, r));
    }
  });
  return y;
}

MatrixI32 dcsr_spmm_vb(const DcsrMatrix& w, const DenseMatrixI8& a,
                       std::int32_t x_zero_point, const VectorI32& bias,
                       VectorEngine& engine, std::size_t threads) {
  validate(w);
  check_activations(w.cols, a.cols());
  check_bias(bias, w.rows);
  const RowIndex index = build_row_index(w);
  const Span8 values(w.values);
  const std::size_t cols = w.cols;
  const std::size_t g = engine.lanes();
  MatrixI32 out(a.rows(), w.rows);
  for_row_ranges(w.rows, threads, engine,
                 [&](std::size_t begin, std::size_t end, VectorEngine& eng) {
    std::vector<std::int8_t> row_buffer(cols);
    const LaneVector zero(g);
    for (std::size_t r = begin; r < end; ++r) {
      for (std::size_t k = 0; k < cols; k += g) {
        eng.store(std::span(row_buffer).subspan(k), zero, eng.first(cols - k));
      }
      RowGroupDecoder decoder(w, index, r, eng);
      DecodedGroup grp;
      std::int32_t weight_sum = 0;
      while (decoder.next(grp)) {
        const LaneVector wv = eng.load(values.subspan(grp.element_begin), grp.active);
        eng.scatter_i8(row_buffer, grp.base, grp.offsets, wv, grp.active);
        weight_sum = eng.sum_acc_i32(wv, grp.active, weight_sum);
      }
      const Span8 buffered(row_buffer);
      for (Eigen::Index p = 0; p < a.rows(); ++p) {
        const Span8 act_row = row_span(a, p);
        std::int32_t acc = 0;
        for (std::size_t k = 0; k < cols; k += g) {
          const Predicate act = eng.first(cols - k);
          acc = eng.dot_acc_i32(eng.load(buffered.subspan(k), act),
                                eng.load(act_row.subspan(k), act), act, acc);
        }
        out(p, static_cast<Eigen::Index>(r)) =
            finish(acc, weight_sum, x_zero_point, bias_at(bias, r));
      }
    }
  });
  return out;
}

MatrixI32 dcsr_spmm_ib(const DcsrMatrix& w, const DenseMatrixI8& a,
                       std::int32_t x_zero_point, const VectorI32& bias,
                       VectorEngine& engine, std::size_t threads) {
  validate(w);
  check_activations(w.cols, a.cols());
  check_bias(bias, w.rows);
  const RowIndex index = build_row_index(w);
  const Span8 values(w.values);
  MatrixI32 out(a.rows(), w.rows);

  // Offsets plus the step from the previous group's base pointer.
  struct BufferedGroup {
    LaneVector offsets;
    Predicate active;
    std::int64_t base_step = 0;
    std::size_t element_begin = 0;
  };

  for_row_ranges(w.rows, threads, engine,
                 [&](std::size_t begin, std::size_t end, VectorEngine& eng) {
    std::vector<BufferedGroup> row_buffer;
    for (std::size_t r = begin; r < end; ++r) {
      row_buffer.clear();
      RowGroupDecoder decoder(w, index, r, eng);
      DecodedGroup grp;
      std::int64_t previous_base = 0;
      std::int32_t weight_sum = 0;
      while (decoder.next(grp)) {
        row_buffer.push_back({grp.offsets, grp.active, grp.base - previous_base,
                              grp.element_begin});
        previous_base = grp.base;
        weight_sum = eng.sum_acc_i32(
            eng.load(values.subspan(grp.element_begin), grp.active), grp.active,
            weight_sum);
      }
      for (Eigen::Index p = 0; p < a.rows(); ++p) {
        const Span8 act_row = row_span(a, p);
        std::int32_t acc = 0;
        std::int64_t base = 0;
        for (const BufferedGroup& bg : row_buffer) {
          base += bg.base_step;
          const LaneVector wv = eng.load(values.subspan(bg.element_begin), bg.active);
          const LaneVector av = eng.gather_i8(act_row, base, bg.offsets, bg.active);
          acc = eng.dot_acc_i32(wv, av, bg.active, acc);
        }
        out(p, static_cast<Eigen::Index>(r)) =
            finish(acc, weight_sum, x_zero_point, bias_at(bias, r));
      }
    }
  });
  return out;
}

VectorI32 ri_spmv(const RiMatrix& w, const VectorI8& x,
                  std::int32_t x_zero_point, const VectorI32& bias,
                  VectorEngine& engine, std::size_t threads) {
  DenseMatrixI8 a(1, x.size());
  a.row(0) = x.transpose();
  const MatrixI32 y = ri_spmm(w, a, x_zero_point, bias, engine, threads);
  return y.row(0).transpose();
}

MatrixI32 ri_spmm(const RiMatrix& w, const DenseMatrixI8& a,
                  std::int32_t x_zero_point, const VectorI32& bias,
                  VectorEngine& engine, std::size_t threads) {
  check_activations(w.cols, a.cols());
  check_bias(bias, w.rows);
  if (w.row_ptr.size() != std::size_t{w.rows} + 1) {
    throw InvalidArgument("RI row_ptr length mismatch");
  }
  const Span8 values(w.values);
  MatrixI32 out(a.rows(), w.rows);
  for_row_ranges(w.rows, threads, engine,
                 [&](std::size_t begin, std::size_t end, VectorEngine& eng) {
    for (std::size_t r = begin; r < end; ++r) {
      const std::vector<GatherRun> runs = extract_ri_row(w, r, eng);
      std::int32_t weight_sum = 0;
      for (const GatherRun& run : runs) {
        weight_sum = eng.sum_acc_i32(
            eng.load(values.subspan(run.element_begin), run.active), run.active,
            weight_sum);
      }
      for (Eigen::Index p = 0; p < a.rows(); ++p) {
        const Span8 act_row = row_span(a, p);
        std::int32_t acc = 0;
        for (const GatherRun& run : runs) {
          const LaneVector wv = eng.load(values.subspan(run.element_begin), run.active);
          const LaneVector av = eng.gather_i8(act_row, run.base, run.offsets, run.active);
          acc = eng.dot_acc_i32(wv, av, run.active, acc);
        }
        out(p, static_cast<Eigen::Index>(r)) =
            finish(acc, weight_sum, x_zero_point, bias_at(bias, r));
      }
    }
  });
  return out;
}

}  // namespace dcsr
