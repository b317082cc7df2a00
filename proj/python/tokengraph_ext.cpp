// Copyright 2026 The TokenGraph Authors. Licensed under the Apache License, Version 2.0.
#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "tokengraph/dataset.hpp"
#include "tokengraph/embeddings.hpp"
#include "tokengraph/error.hpp"
#include "tokengraph/graph.hpp"
#include "tokengraph/metrics.hpp"
#include "tokengraph/tokenizer.hpp"
#include "tokengraph/trainer.hpp"

namespace py = pybind11;
using namespace tokengraph;

namespace {

// JSON crosses the boundary as text; the stdlib json module does the rest.
py::object to_python(const nlohmann::json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

nlohmann::json from_python(const py::object& o) {
  return nlohmann::json::parse(py::module_::import("json").attr("dumps")(o).cast<std::string>());
}

py::array_t<std::uint32_t> edges_array(const std::vector<Edge>& edges) {
  py::array_t<std::uint32_t> out({static_cast<py::ssize_t>(edges.size()), py::ssize_t{2}});
  auto v = out.mutable_unchecked<2>();
  for (std::size_t i = 0; i < edges.size(); ++i) {
    v(static_cast<py::ssize_t>(i), 0) = edges[i].src;
    v(static_cast<py::ssize_t>(i), 1) = edges[i].dst;
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_tokengraph, m) {
  m.doc() = "Token-level graph attention for few-shot short-text classification";

  auto validation = py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<ShapeError>(m, "ShapeError", validation.ptr());
  py::register_exception<FormatError>(m, "FormatError", PyExc_ValueError);
  py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);

  // tokenizer
  py::class_<Vocab>(m, "Vocab")
      .def(py::init<std::vector<std::string>>(), py::arg("tokens"))
      .def("__len__", &Vocab::size)
      .def("find", &Vocab::find, py::arg("token"))
      .def("token", &Vocab::token, py::arg("id"))
      .def_property_readonly("unk_id", &Vocab::unk_id)
      .def_property_readonly("cls_id", &Vocab::cls_id)
      .def_property_readonly("sep_id", &Vocab::sep_id);
  m.def("load_vocab", &load_vocab, py::arg("path"));
  m.def("basic_tokenize", &basic_tokenize, py::arg("text"));
  m.def(
      "wordpiece",
      [](std::string_view word, const Vocab& vocab, std::size_t max_chars) {
        std::vector<std::pair<TokenId, std::string>> out;
        for (const Token& t : wordpiece(word, vocab, max_chars)) out.emplace_back(t.id, t.surface);
        return out;
      },
      py::arg("word"), py::arg("vocab"), py::arg("max_chars") = 100);
  m.def(
      "tokenize",
      [](std::string_view text, const Vocab& vocab, bool add_special, std::size_t max_len) {
        const TokenSequence seq = tokenize(text, vocab, {.add_special = add_special, .max_len = max_len});
        std::vector<std::string> surfaces;
        for (const Token& t : seq.tokens) surfaces.push_back(t.surface);
        return py::make_tuple(seq.ids(), surfaces);
      },
      py::arg("text"), py::arg("vocab"), py::arg("add_special") = true, py::arg("max_len") = 512,
      "Returns (ids, surfaces).");

  // graphs
  m.def(
      "build_edges", [](std::size_t len, std::size_t n_hop) { return edges_array(build_edges(len, n_hop)); },
      py::arg("seq_len"), py::arg("n_hop"), "Directed edges as an (E, 2) uint32 array sorted by (src, dst).");
  m.def("edge_count", &edge_count, py::arg("seq_len"), py::arg("n_hop"));

  // embeddings and files
  m.def(
      "fallback_embed",
      [](const std::vector<TokenId>& ids, std::size_t dim, std::uint64_t seed) {
        return fallback_embed(std::span<const TokenId>(ids), dim, seed);
      },
      py::arg("token_ids"), py::arg("dim"), py::arg("seed") = 0);

  py::class_<EmbeddingShard>(m, "EmbeddingShard")
      .def(py::init<>())
      .def(
          "add",
          [](EmbeddingShard& s, SampleId id, std::vector<TokenId> ids, FloatMatrix values) {
            s.add({id, std::move(ids), std::move(values)});
          },
          py::arg("sample_id"), py::arg("token_ids"), py::arg("values"))
      .def("__len__", [](const EmbeddingShard& s) { return s.records().size(); })
      .def_property_readonly("dim", &EmbeddingShard::dim)
      .def("sample_ids",
           [](const EmbeddingShard& s) {
             std::vector<SampleId> ids;
             for (const auto& r : s.records()) ids.push_back(r.sample_id);
             return ids;
           })
      .def(
          "get",
          [](const EmbeddingShard& s, SampleId id) {
            const ShardRecord* r = s.find(id);
            if (r == nullptr) throw py::key_error(std::to_string(id));
            return py::make_tuple(r->token_ids, r->values);
          },
          py::arg("sample_id"), "Returns (token_ids, values).")
      .def(py::self == py::self);  // bitwise
  m.def("write_shard", &write_shard, py::arg("shard"), py::arg("path"));
  m.def("read_shard", &read_shard, py::arg("path"));

  py::class_<ManifestEntry>(m, "ManifestEntry")
      .def(py::init([](SampleId id, std::string label, std::size_t n) { return ManifestEntry{id, std::move(label), n}; }),
           py::arg("id"), py::arg("label"), py::arg("n_tokens"))
      .def_readwrite("id", &ManifestEntry::id)
      .def_readwrite("label", &ManifestEntry::label)
      .def_readwrite("n_tokens", &ManifestEntry::n_tokens);
  py::class_<Manifest>(m, "Manifest")
      .def(py::init<>())
      .def_readwrite("label_names", &Manifest::label_names)
      .def_readwrite("entries", &Manifest::entries)
      .def_readwrite("includes_special", &Manifest::includes_special)
      .def_readwrite("source", &Manifest::source)
      .def("validate", &Manifest::validate);
  m.def("write_manifest", &write_manifest, py::arg("manifest"), py::arg("path"));
  m.def("read_manifest", &read_manifest, py::arg("path"));
  m.def("check_consistency", &check_consistency, py::arg("manifest"), py::arg("shard"));

  // metrics
  m.def("accuracy", [](const std::vector<int>& p, const std::vector<int>& g) { return accuracy(p, g); },
        py::arg("preds"), py::arg("golds"));
  m.def(
      "macro_f1", [](const std::vector<int>& p, const std::vector<int>& g, std::size_t c) { return macro_f1(p, g, c); },
      py::arg("preds"), py::arg("golds"), py::arg("classes"));
  m.def(
      "welch_t_test",
      [](const std::vector<double>& a, const std::vector<double>& b, double alpha, std::size_t comparisons) {
        const WelchResult r = welch_t_test(a, b, alpha, comparisons);
        py::dict d;
        d["t"] = r.t;
        d["df"] = r.df;
        d["p"] = r.p;
        d["alpha"] = r.alpha;
        d["comparisons"] = r.comparisons;
        d["significant"] = r.significant;
        d["variance_floored"] = r.variance_floored;
        return d;
      },
      py::arg("a"), py::arg("b"), py::arg("alpha") = 0.05, py::arg("comparisons") = 1);

  // experiments
  m.def(
      "generate_synthetic",
      [](std::size_t classes, std::size_t per_class, std::uint64_t seed) {
        SyntheticConfig c;
        c.classes = classes;
        c.per_class = per_class;
        c.seed = seed;
        const SyntheticData d = generate_synthetic(c);
        std::vector<py::tuple> samples;
        for (const Sample& s : d.samples) samples.push_back(py::make_tuple(s.id, s.text, s.label));
        return py::make_tuple(samples, d.vocab);
      },
      py::arg("classes") = 2, py::arg("per_class") = 200, py::arg("seed") = 0,
      "Returns (samples as (id, text, label) tuples, vocab tokens).");
  m.def(
      "embed_dataset",
      [](const std::vector<std::tuple<SampleId, std::string, std::string>>& rows, const Vocab& vocab,
         std::size_t dim, std::uint64_t seed, bool add_special) {
        std::vector<Sample> samples;
        for (const auto& [id, text, label] : rows) samples.push_back({id, text, label});
        EmbeddedDataset e = embed_dataset(samples, vocab, dim, seed, add_special);
        return py::make_tuple(std::move(e.shard), std::move(e.manifest));
      },
      py::arg("samples"), py::arg("vocab"), py::arg("dim") = 768, py::arg("seed") = 0, py::arg("add_special") = true,
      "Returns (EmbeddingShard, Manifest).");
  m.def(
      "run_experiment",
      [](const EmbeddingShard& shard, const Manifest& manifest, const py::object& config, std::size_t workers) {
        const TrainConfig c = config.is_none() ? TrainConfig{} : config_from_json(from_python(config));
        nlohmann::json report;
        {
          py::gil_scoped_release release;
          report = report_to_json(run_experiment(shard, manifest, c, workers).report);
        }
        return to_python(report);
      },
      py::arg("shard"), py::arg("manifest"), py::arg("config") = py::none(), py::arg("workers") = 0,
      "Runs the few-shot protocol; config is a dict of training options. Returns the run report as a dict.");
}
