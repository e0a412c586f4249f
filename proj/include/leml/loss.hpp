/*
 * Copyright 2026 LEML Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *   http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef LEML_LOSS_HPP
#define LEML_LOSS_HPP

#include <cmath>
#include <string>

#include "leml/error.hpp"

namespace leml {

// The three decomposable losses in scalar form l(a, b): a is the encoded
// label, b the decision value. Squared loss keeps the {0,1} label encoding;
// logistic and L2-hinge use {-1,+1}.
//
//   squared:   l = (a-b)^2 / 2      l' = b - a              l'' = 1
//   logistic:  l = log(1+e^{-ab})   l' = -a / (1+e^{ab})    l'' = a^2 q(1-q),  q = 1/(1+e^{-ab})
//   l2hinge:   l = max(0,1-ab)^2    l' = -2a max(0,1-ab)    l'' = 2 [ab < 1]
enum class LossKind { squared, logistic, l2hinge };

inline const char* loss_name(LossKind kind) {
    switch (kind) {
        case LossKind::squared: return "squared";
        case LossKind::logistic: return "logistic";
        case LossKind::l2hinge: return "l2hinge";
    }
    return "?";
}

inline LossKind loss_from_name(const std::string& name) {
    if (name == "squared") return LossKind::squared;
    if (name == "logistic") return LossKind::logistic;
    if (name == "l2hinge") return LossKind::l2hinge;
    throw ParseError("unknown loss: " + name);
}

// 0/1 storage value -> the loss's label encoding.
inline double encode_label(LossKind kind, double y01) {
    return kind == LossKind::squared ? y01 : 2.0 * y01 - 1.0;
}

namespace detail {
// 1 / (1 + e^{-t}) without overflow for large |t|.
inline double sigmoid(double t) {
    if (t >= 0) return 1.0 / (1.0 + std::exp(-t));
    const double e = std::exp(t);
    return e / (1.0 + e);
}
} // namespace detail

inline double loss_value(LossKind kind, double a, double b) {
    switch (kind) {
        case LossKind::squared: {
            const double r = a - b;
            return 0.5 * r * r;
        }
        case LossKind::logistic: {
            // log(1+e^m) = max(m,0) + log1p(e^{-|m|}) with m = -ab
            const double m = -a * b;
            return (m > 0 ? m : 0.0) + std::log1p(std::exp(-std::fabs(m)));
        }
        case LossKind::l2hinge: {
            const double m = 1.0 - a * b;
            return m > 0 ? m * m : 0.0;
        }
    }
    return 0;
}

inline double loss_grad(LossKind kind, double a, double b) {
    switch (kind) {
        case LossKind::squared:
            return b - a;
        case LossKind::logistic:
            return -a * detail::sigmoid(-a * b);
        case LossKind::l2hinge: {
            const double m = 1.0 - a * b;
            return m > 0 ? -2.0 * a * m : 0.0;
        }
    }
    return 0;
}

inline double loss_curv(LossKind kind, double a, double b) {
    switch (kind) {
        case LossKind::squared:
            return 1.0;
        case LossKind::logistic: {
            const double q = detail::sigmoid(a * b);
            return a * a * q * (1.0 - q);
        }
        case LossKind::l2hinge:
            return a * b < 1.0 ? 2.0 : 0.0;
    }
    return 0;
}

} // namespace leml

#endif // LEML_LOSS_HPP
