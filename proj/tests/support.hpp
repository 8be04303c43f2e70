#pragma once

#include "litsieve/bibtex.hpp"
#include "litsieve/corpus.hpp"
#include "litsieve/json.hpp"

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

namespace testing {

inline std::filesystem::path fixture(const std::string& name) { return std::filesystem::path(LITSIEVE_FIXTURES) / name; }

inline std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline nlohmann::json load_json(const std::string& name) { return nlohmann::json::parse(slurp(fixture(name))); }

/// Fresh directory removed on destruction.
class TempDir {
public:
    TempDir() {
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() / ("litsieve-test-" + std::to_string(rd()) + std::to_string(rd()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

inline litsieve::Corpus golden_corpus() {
    litsieve::Corpus corpus;
    corpus.id = "golden";
    auto parsed = litsieve::parse_bibtex(slurp(fixture("golden/corpus.bib")));
    litsieve::merge_into_corpus(corpus, parsed.records, "corpus.bib");
    return corpus;
}

inline std::vector<litsieve::AgentConfig> golden_agents() {
    return load_json("golden/agents.json").get<std::vector<litsieve::AgentConfig>>();
}

inline litsieve::PromptTemplate golden_template() {
    auto t = load_json("golden/template.json").get<litsieve::PromptTemplate>();
    t.version = 1;
    return t;
}

inline std::vector<litsieve::GroundTruthLabel> golden_labels() {
    return litsieve::parse_labels_csv(slurp(fixture("golden/labels.csv")));
}

}  // namespace testing
