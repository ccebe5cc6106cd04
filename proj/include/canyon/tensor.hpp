// SPDX-License-Identifier: Apache-2.0
//
// canyon-qd: sub-THz street-canyon channel processing and synthesis
// Copyright (C) 2026 The canyon-qd Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef CANYON_TENSOR_HPP
#define CANYON_TENSOR_HPP

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace canyon
{
    // Dense row-major [delay-or-frequency][aod][aoa] cube.
    template <typename T>
    class Tensor3
    {
    public:
        Tensor3() = default;
        Tensor3(std::size_t n0, std::size_t n1, std::size_t n2, T fill = T{})
            : n0_(n0), n1_(n1), n2_(n2), data_(n0 * n1 * n2, fill) {}

        std::size_t dim0() const { return n0_; }
        std::size_t dim1() const { return n1_; }
        std::size_t dim2() const { return n2_; }
        std::size_t size() const { return data_.size(); }
        std::size_t slice_size() const { return n1_ * n2_; }
        bool empty() const { return data_.empty(); }

        std::size_t index(std::size_t i0, std::size_t i1, std::size_t i2) const
        {
            return (i0 * n1_ + i1) * n2_ + i2;
        }

        T &operator()(std::size_t i0, std::size_t i1, std::size_t i2) { return data_[index(i0, i1, i2)]; }
        const T &operator()(std::size_t i0, std::size_t i1, std::size_t i2) const { return data_[index(i0, i1, i2)]; }

        T &operator[](std::size_t flat) { return data_[flat]; }
        const T &operator[](std::size_t flat) const { return data_[flat]; }

        // All (aod, aoa) entries at one delay/frequency index.
        std::span<T> slice(std::size_t i0) { return {data_.data() + i0 * slice_size(), slice_size()}; }
        std::span<const T> slice(std::size_t i0) const { return {data_.data() + i0 * slice_size(), slice_size()}; }

        std::span<T> flat() { return data_; }
        std::span<const T> flat() const { return data_; }
        T *data() { return data_.data(); }
        const T *data() const { return data_.data(); }

        bool same_shape(const Tensor3 &other) const
        {
            return n0_ == other.n0_ && n1_ == other.n1_ && n2_ == other.n2_;
        }

        bool operator==(const Tensor3 &) const = default;

    private:
        std::size_t n0_ = 0, n1_ = 0, n2_ = 0;
        std::vector<T> data_;
    };
} // namespace canyon

#endif
