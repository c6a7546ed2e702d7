#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <json.hpp>

#include "litpipe/bibkit.hpp"
#include "litpipe/chat.hpp"
#include "litpipe/config.hpp"
#include "litpipe/error.hpp"
#include "litpipe/ingest.hpp"
#include "litpipe/pipeline.hpp"
#include "litpipe/providers.hpp"
#include "litpipe/review.hpp"
#include "litpipe/semantic.hpp"
#include "litpipe/server.hpp"

namespace py = pybind11;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

py::object to_py(const json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

json from_py(const py::handle& obj) {
    if (obj.is_none()) return json();
    return json::parse(py::module_::import("json").attr("dumps")(obj).cast<std::string>());
}

litpipe::SuiteConfig offline_config(const fs::path& workspace, const std::optional<fs::path>& fixtures,
                                    const py::object& overrides) {
    litpipe::SuiteConfig c;
    c.workspace = workspace;
    c.offline = true;
    if (fixtures) c.fixtures = *fixtures;
    litpipe::apply_overrides(c, from_py(overrides));
    c.validate();
    return c;
}

litpipe::ingest::DocumentText text_document(const std::string& text) {
    litpipe::ingest::DocumentText doc;
    doc.doc_id = "text";
    doc.full_text = litpipe::ingest::normalize_text(text);
    doc.sections = litpipe::ingest::segment_sections(doc.full_text);
    return doc;
}

class PyService {
public:
    PyService(const fs::path& workspace, const std::optional<fs::path>& fixtures, const py::object& overrides)
        : service_(offline_config(workspace, fixtures, overrides)) {}

    py::tuple handle(const std::string& method, const std::string& path, const py::object& body) {
        litpipe::server::ApiResponse r;
        const auto payload = body.is_none() ? std::string() : from_py(body).dump();
        {
            py::gil_scoped_release release;
            r = service_.handle(method, path, payload);
        }
        return py::make_tuple(r.status, to_py(r.body));
    }

    void join_runs() {
        py::gil_scoped_release release;
        service_.join_runs();
    }

private:
    litpipe::server::Service service_;
};

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Literature pipeline bindings";

    static py::exception<litpipe::Error> error_type(m, "LitpipeError", PyExc_RuntimeError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const litpipe::Error& e) {
            py::object err = py::handle(error_type.ptr())(py::str(e.what()));
            err.attr("code") = e.code();
            err.attr("detail") = e.detail();
            PyErr_SetObject(error_type.ptr(), err.ptr());
        }
    });

    m.def("normalize_doi", [](const std::string& raw) { return litpipe::normalize_doi(raw); },
          "Canonical lowercase DOI, or None when the text holds no DOI.", py::arg("raw"));

    m.def(
        "format_apa",
        [](const py::object& record) { return litpipe::format_apa_reference(from_py(record).get<litpipe::BibRecord>()); },
        "APA 7 reference-list entry for a record dict.", py::arg("record"));

    m.def(
        "format_apa_intext",
        [](const py::object& record) { return litpipe::format_apa_intext(from_py(record).get<litpipe::BibRecord>()); },
        "Parenthetical APA in-text citation for a record dict.", py::arg("record"));

    m.def(
        "hash_embed", [](const std::string& text) { return litpipe::semantic::hash_embed(text).values; },
        "Unit-length 256-bucket hashed bag-of-words vector.", py::arg("text"));

    m.def(
        "segment_sections",
        [](const std::string& text) { return to_py(json(text_document(text).sections)); },
        "Labelled sections of plain text.", py::arg("text"));

    m.def(
        "chunk_text",
        [](const std::string& text, std::size_t max_chunk_chars, std::size_t overlap_chars) {
            const auto chunks = litpipe::ingest::chunk_document(text_document(text), {max_chunk_chars, overlap_chars});
            return to_py(json(chunks));
        },
        "Section-aware overlapping chunks of plain text.", py::arg("text"), py::arg("max_chunk_chars") = 2000,
        py::arg("overlap_chars") = 200);

    m.def(
        "extractive_answer",
        [](const std::string& question, const std::vector<std::string>& passages) {
            std::vector<litpipe::chat::ContextBlock> blocks;
            for (std::size_t i = 0; i < passages.size(); ++i) {
                blocks.push_back({"p#" + std::to_string(i), passages[i], i});
            }
            return litpipe::chat::extractive_answer(question, blocks);
        },
        "Sentences from the passages most similar to the question.", py::arg("question"), py::arg("passages"));

    m.def(
        "build_table",
        [](const fs::path& root, const std::optional<fs::path>& fixtures) {
            const auto config = offline_config(root, fixtures, py::none());
            litpipe::review::TableResult result;
            {
                py::gil_scoped_release release;
                auto providers = litpipe::make_providers(config);
                result = litpipe::review::build_table(root, config.queries, providers.review(),
                                                      {config.chunk, config.k, config.workers});
            }
            return to_py(json{{"rows", result.rows}, {"skipped", result.skipped}});
        },
        "Offline literature table for a folder of PDFs.", py::arg("root"), py::arg("fixtures") = py::none());

    m.def(
        "export_table",
        [](const py::object& rows, const fs::path& dest) {
            std::vector<std::string> out;
            for (const auto& p :
                 litpipe::review::export_table(from_py(rows).get<std::vector<litpipe::review::ReviewRow>>(), dest)) {
                out.push_back(p.string());
            }
            return out;
        },
        "Writes one CSV per group plus manifest.json.", py::arg("rows"), py::arg("dest"));

    m.def(
        "run_pipeline",
        [](const fs::path& folder, const fs::path& workspace, const std::optional<fs::path>& fixtures,
           const py::object& overrides) {
            const auto config = offline_config(workspace, fixtures, overrides);
            litpipe::pipeline::PipelineRun run;
            {
                py::gil_scoped_release release;
                run = litpipe::pipeline::run_pipeline(config, folder);
            }
            auto j = litpipe::pipeline::to_json(run);
            j["run_dir"] = run.run_dir.string();
            return to_py(j);
        },
        "Offline folder run; returns the run record.", py::arg("folder"), py::arg("workspace"),
        py::arg("fixtures") = py::none(), py::arg("overrides") = py::none());

    py::class_<PyService>(m, "Service", "In-process JSON API (offline providers).")
        .def(py::init<const fs::path&, const std::optional<fs::path>&, const py::object&>(), py::arg("workspace"),
             py::arg("fixtures") = py::none(), py::arg("overrides") = py::none())
        .def("handle", &PyService::handle, "Returns (status, body) for one API request.", py::arg("method"),
             py::arg("path"), py::arg("body") = py::none())
        .def("join_runs", &PyService::join_runs, "Waits for background runs.");
}
