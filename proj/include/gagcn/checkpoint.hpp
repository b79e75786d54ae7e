// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "gagcn/decoder.hpp"
#include "gagcn/tape.hpp"

// Flat binary container of named parameter tensors with a versioned header
// and a JSON metadata blob (the model configuration). Layout, all
// little-endian:
//
//   magic   "GAGCNCK1"              8 bytes
//   u32     version (= 1)
//   u32     meta length, then meta bytes (UTF-8 JSON)
//   u32     tensor count
//   per tensor:
//     u32   name length, then name bytes
//     u8    precision (0 = binary32, 1 = binary64)
//     u32   rank
//     u32   dims[rank]
//     raw   IEEE-754 payload, product(dims) * element size bytes
//   u32     end marker 0x444E4547 ("GEND")

namespace gagcn {

struct CheckpointEntry {
  std::string name;
  Precision prec = Precision::binary64;
  std::vector<int> shape;
  std::vector<double> values;  // widened on load; binary32 payloads are exact in double
};

struct Checkpoint {
  std::string meta;
  std::vector<CheckpointEntry> entries;
};

namespace detail {
struct RawTensorRef {
  std::string name;
  Precision prec;
  std::vector<int> shape;
  const void* data;
  std::size_t bytes;
};
void write_checkpoint_raw(const std::filesystem::path& path, const std::string& meta,
                          const std::vector<RawTensorRef>& tensors);
}  // namespace detail

Checkpoint load_checkpoint(const std::filesystem::path& path);

template <class T>
void save_checkpoint(const std::filesystem::path& path, const std::string& meta,
                     const std::vector<Parameter<T>*>& params) {
  std::vector<detail::RawTensorRef> refs;
  refs.reserve(params.size());
  for (const Parameter<T>* p : params) {
    refs.push_back(detail::RawTensorRef{p->name, precision_of<T>::value, p->value.shape(),
                                        p->value.data(), p->value.size() * sizeof(T)});
  }
  detail::write_checkpoint_raw(path, meta, refs);
}

/// Assign loaded entries into parameters, matched by name. Every parameter
/// must be present with an identical shape; extra entries are rejected.
template <class T>
void assign_parameters(const Checkpoint& ck, const std::vector<Parameter<T>*>& params) {
  std::vector<bool> used(ck.entries.size(), false);
  for (Parameter<T>* p : params) {
    const CheckpointEntry* found = nullptr;
    for (std::size_t i = 0; i < ck.entries.size(); ++i) {
      if (ck.entries[i].name == p->name) {
        found = &ck.entries[i];
        used[i] = true;
        break;
      }
    }
    if (found == nullptr) {
      throw IoError("checkpoint: missing tensor '" + p->name + "'");
    }
    if (found->shape != p->value.shape()) {
      throw ShapeError("checkpoint: tensor '" + p->name + "' has shape " +
                       format_shape(found->shape) + " but model expects " + p->value.shape_str());
    }
    for (std::size_t j = 0; j < found->values.size(); ++j) {
      p->value[j] = static_cast<T>(found->values[j]);
    }
  }
  for (std::size_t i = 0; i < used.size(); ++i) {
    if (!used[i]) throw IoError("checkpoint: unexpected tensor '" + ck.entries[i].name + "'");
  }
}

// Model-level helpers: the metadata blob carries the ModelConfig and the
// stored precision, so a checkpoint alone rebuilds the model.

std::string model_meta_json(const ModelConfig& cfg, Precision prec);
ModelConfig model_config_from_meta(const std::string& meta);
Precision precision_from_meta(const std::string& meta);

template <class T>
void save_model(const std::filesystem::path& path, GagcnModel<T>& model) {
  save_checkpoint<T>(path, model_meta_json(model.cfg, precision_of<T>::value),
                     model.parameters());
}

template <class T>
GagcnModel<T> load_model(const std::filesystem::path& path) {
  const Checkpoint ck = load_checkpoint(path);
  GagcnModel<T> model(model_config_from_meta(ck.meta), /*seed=*/0);
  assign_parameters(ck, model.parameters());
  return model;
}

}  // namespace gagcn
