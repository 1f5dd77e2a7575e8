// Copyright 2026 The chist Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace chist {

/// Base class for every error raised by the engine.
class Error : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
   public:
    using Error::Error;
};

/// A matrix or vector contained NaN or Inf.
class NotFinite : public Error {
   public:
    using Error::Error;
};

/// A value violated the invariant of the type being constructed
/// (non-projector, non-unitary, bad decomposition, ...).
class InvalidValue : public Error {
   public:
    using Error::Error;
};

class IndexOutOfRange : public Error {
   public:
    using Error::Error;
};

class LabelNotFound : public Error {
   public:
    using Error::Error;
};

/// Probabilities were requested for a family that fails the consistency
/// conditions. Mixing incompatible descriptions is refused at the API boundary.
class InconsistentFamily : public Error {
   public:
    using Error::Error;
};

class ZeroConditionProbability : public Error {
   public:
    using Error::Error;
};

/// Two families were compared that do not share the same dynamics.
class PropagatorMismatch : public Error {
   public:
    using Error::Error;
};

class DuplicateTime : public Error {
   public:
    using Error::Error;
};

class CyclicCausality : public Error {
   public:
    using Error::Error;
};

class EmbeddingImpossible : public Error {
   public:
    EmbeddingImpossible(const std::string &what, std::string blocking_event, std::string other_event)
        : Error(what), blocking_event_(std::move(blocking_event)), other_event_(std::move(other_event)) {}

    const std::string &blocking_event() const { return blocking_event_; }
    const std::string &other_event() const { return other_event_; }

   private:
    std::string blocking_event_;
    std::string other_event_;
};

}  // namespace chist
