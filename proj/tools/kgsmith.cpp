// kgsmith: command-line front end. JSON output (--format json) matches the
// REST payloads; text output is for people.

#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "kgsmith/platform.hpp"
#include "kgsmith/server.hpp"

namespace {

using nlohmann::json;
using namespace kgsmith;

constexpr int exit_domain = 1;
constexpr int exit_usage = 2;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::IoFailure, "cannot read " + path);
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

json read_json(const std::string& path) {
  json j = json::parse(read_file(path), nullptr, false);
  if (j.is_discarded()) {
    throw Error(ErrorCode::MalformedFile, path + " is not valid JSON");
  }
  return j;
}

Server* running_server = nullptr;

extern "C" void on_signal(int) {
  if (running_server != nullptr) {
    running_server->stop();
  }
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Build knowledge graphs from records and transcripts, and answer questions over them."};
  app.require_subcommand(1);

  std::string data_dir = "./kgdata";
  std::string format = "text";
  std::string resources = KGSMITH_DATA_DIR;
  app.add_option("--data-dir", data_dir, "Store directory")->envname("KGSMITH_DATA_DIR");
  app.add_option("--format", format, "Output format")
      ->check(CLI::IsMember({"json", "text"}))
      ->envname("KGSMITH_FORMAT");
  app.add_option("--resources", resources, "Directory with dictionaries, templates and extractor files")
      ->envname("KGSMITH_RESOURCES");

  auto* kg = app.add_subcommand("kg", "Manage knowledge graphs");
  kg->require_subcommand(1);

  std::string ontology_path;
  auto* kg_create = kg->add_subcommand("create", "Create a knowledge graph from an ontology file");
  kg_create->add_option("--ontology", ontology_path, "Ontology JSON file")->required();

  auto* kg_list = kg->add_subcommand("list", "List knowledge graphs");

  std::string kg_name;
  auto* kg_show = kg->add_subcommand("show", "Show one knowledge graph");
  kg_show->add_option("name", kg_name)->required();

  auto* kg_delete = kg->add_subcommand("delete", "Delete a knowledge graph and everything in it");
  kg_delete->add_option("name", kg_name)->required();

  std::string data_path;
  auto* kg_ingest = kg->add_subcommand("ingest", "Ingest a JSON data file");
  kg_ingest->add_option("name", kg_name)->required();
  kg_ingest->add_option("file", data_path)->required()->check(CLI::ExistingFile);

  auto* kg_export = kg->add_subcommand("export", "Print the graph as Cypher statements");
  kg_export->add_option("name", kg_name)->required();

  GraphQuery query;
  std::string entity, type, relation;
  auto* kg_graph = kg->add_subcommand("graph", "Query a graph by entity, type or relation");
  kg_graph->add_option("name", kg_name)->required();
  auto* opt_entity = kg_graph->add_option("--entity", entity);
  auto* opt_type = kg_graph->add_option("--type", type);
  auto* opt_relation = kg_graph->add_option("--relation", relation);

  std::string question;
  auto* qa = app.add_subcommand("qa", "Answer a question against a knowledge graph");
  qa->add_option("name", kg_name)->required();
  qa->add_option("question", question)->required();

  std::string transcript_path;
  std::string weights_path;
  double threshold = mie::default_threshold;
  std::size_t window = 0;
  std::uint64_t seed = 7;
  auto* analyze = app.add_subcommand("analyze", "Extract labels from a transcript into a dialogue graph");
  analyze->add_option("name", kg_name)->required();
  analyze->add_option("transcript", transcript_path)->required()->check(CLI::ExistingFile);

  ServerConfig server_config;
  std::size_t max_upload = std::size_t{16} << 20;
  std::vector<std::string> cors;
  auto* serve = app.add_subcommand("serve", "Run the REST service");
  serve->add_option("--host", server_config.host)->envname("KGSMITH_HOST");
  serve->add_option("--port", server_config.port)->envname("KGSMITH_PORT");
  serve->add_option("--cors", cors, "Allowed browser origins")->envname("KGSMITH_CORS")->delimiter(',');
  serve->add_option("--max-upload", max_upload, "Upload limit in bytes")->envname("KGSMITH_MAX_UPLOAD");

  auto* weights = app.add_subcommand("weights", "Write a seeded extractor weights file");
  std::string weights_out;
  std::size_t emb = 8, hidden = 8, fc = 8;
  weights->add_option("output", weights_out)->required();
  weights->add_option("--emb", emb);
  weights->add_option("--hidden", hidden);
  weights->add_option("--fc", fc);

  for (auto* cmd : {analyze, serve}) {
    cmd->add_option("--weights", weights_path, "Extractor weights file")->envname("KGSMITH_WEIGHTS");
    cmd->add_option("--threshold", threshold)->envname("KGSMITH_THRESHOLD");
    cmd->add_option("--window", window, "Sliding window size (0 = whole dialogue)")->envname("KGSMITH_WINDOW");
  }
  for (auto* cmd : {analyze, serve, weights}) {
    cmd->add_option("--seed", seed, "Seed for generated weights")->envname("KGSMITH_SEED");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return exit_usage;
  }

  const bool as_json = format == "json";
  auto emit = [&](const json& payload, const std::string& text) {
    if (as_json) {
      std::cout << payload.dump(2) << "\n";
    } else {
      std::cout << text;
    }
  };

  try {
    if (weights->parsed()) {
      const auto vocab = mie::Vocabulary::load(std::filesystem::path(resources) / "mie.vocab");
      mie::save_weights(mie::seeded_params({vocab.size(), emb, hidden, fc}, seed), weights_out);
      emit(json{{"output", weights_out}, {"vocab", vocab.size()}}, "wrote " + weights_out + "\n");
      return 0;
    }

    PlatformConfig config;
    config.data_dir = data_dir;
    config.resource_dir = resources;
    config.seed = seed;
    config.threshold = threshold;
    if (window > 0) {
      config.window = window;
    }
    if (!weights_path.empty()) {
      config.weights = weights_path;
    }
    config.max_upload_bytes = max_upload;
    Platform platform(config);

    if (kg_create->parsed()) {
      const json out = platform.create_kg(read_json(ontology_path));
      emit(out, "created " + out["name"].get<std::string>() + " (" + out["dataType"].get<std::string>() + ", " +
                    std::to_string(out["labels"].size()) + " entity types, " +
                    std::to_string(out["relations"].size()) + " relations)\n");
    } else if (kg_list->parsed()) {
      const json out = platform.list_kgs();
      std::string text;
      for (const auto& row : out) {
        text += row["name"].get<std::string>() + "\t" + row["createdAt"].get<std::string>() + "\t" +
                row["dataType"].get<std::string>() + "\n";
      }
      emit(out, text);
    } else if (kg_show->parsed()) {
      const json out = platform.get_kg(kg_name);
      emit(out, out.dump(2) + "\n");
    } else if (kg_delete->parsed()) {
      const json out = platform.delete_kg(kg_name);
      emit(out, "deleted " + kg_name + ": " + std::to_string(out["nodesRemoved"].get<std::size_t>()) + " nodes, " +
                    std::to_string(out["edgesRemoved"].get<std::size_t>()) + " edges\n");
    } else if (kg_ingest->parsed()) {
      const json out = platform.ingest(kg_name, read_file(data_path));
      std::string text = std::to_string(out["records"].get<std::size_t>()) + " records: " +
                         std::to_string(out["nodesCreated"].get<std::size_t>()) + " nodes and " +
                         std::to_string(out["edgesCreated"].get<std::size_t>()) + " edges created, " +
                         std::to_string(out["nodesSkipped"].get<std::size_t>()) + " nodes and " +
                         std::to_string(out["edgesSkipped"].get<std::size_t>()) + " edges already present\n";
      for (const auto& w : out["warnings"]) {
        text += "warning: " + w.get<std::string>() + "\n";
      }
      emit(out, text);
    } else if (kg_export->parsed()) {
      // Cypher is text in both formats, byte-identical to the REST body.
      std::cout << platform.export_cypher(kg_name);
    } else if (kg_graph->parsed()) {
      if (*opt_entity) query.entity = entity;
      if (*opt_type) query.type = type;
      if (*opt_relation) query.relation = relation;
      const json out = platform.graph(kg_name, query);
      std::string text;
      for (const auto& n : out["nodes"]) {
        text += "node " + std::to_string(n["id"].get<std::uint64_t>()) + " " + n["type"].get<std::string>() + " " +
                n["name"].get<std::string>() + "\n";
      }
      for (const auto& e : out["edges"]) {
        text += "edge " + std::to_string(e["id"].get<std::uint64_t>()) + " " +
                std::to_string(e["from"].get<std::uint64_t>()) + " -[" + e["type"].get<std::string>() + "]-> " +
                std::to_string(e["to"].get<std::uint64_t>()) + "\n";
      }
      emit(out, text);
    } else if (qa->parsed()) {
      const json out = platform.qa({{"kg", kg_name}, {"question", question}});
      emit(out, out["answer"].get<std::string>() + "\n");
    } else if (analyze->parsed()) {
      json body = read_json(transcript_path);
      if (!body.is_object()) {
        throw Error(ErrorCode::MalformedFile, "transcript must be a JSON object");
      }
      body["kg"] = kg_name;
      const json out = platform.analyze(body);
      std::string text = "patient " + out["patient"].get<std::string>() + "\n";
      for (const auto& l : out["labels"]) {
        char score[32];
        std::snprintf(score, sizeof score, "%.4f", l["score"].get<double>());
        text += "  " + l["label"].get<std::string>() + "  " + score + "\n";
      }
      for (const auto& c : out["cohort"]) {
        text += "cohort " + c["symptom"].get<std::string>() + ": " +
                std::to_string(c["patients"].get<std::size_t>()) + " patients\n";
      }
      emit(out, text);
    } else if (serve->parsed()) {
      server_config.cors_origins = cors;
      Server server(platform, server_config);
      const int port = server.bind();
      running_server = &server;
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      std::cerr << "listening on " << server_config.host << ":" << port << "\n";
      server.serve();
      running_server = nullptr;
    }
  } catch (const Error& e) {
    if (as_json) {
      std::cerr << error_body(e.code(), e.what()).dump() << "\n";
    } else {
      std::cerr << "error: " << to_string(e.code()) << ": " << e.what() << "\n";
    }
    return exit_domain;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_domain;
  }
  return 0;
}
