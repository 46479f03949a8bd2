#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "doctest.h"
#include "tagforest/io.hpp"
#include "tagforest/manifest.hpp"

using namespace tagforest;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string output;
};

fs::path workdir() {
  static const fs::path dir = [] {
    fs::path d = fs::path(TAGFOREST_TEST_TMP) / "cli";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

Run cli(const std::string& args) {
  const auto log = workdir() / "last.log";
  const std::string cmd = std::string("cd '") + workdir().string() + "' && '" + TAGFOREST_CLI_PATH + "' " + args +
                          " > '" + log.string() + "' 2>&1";
  const int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.output = read_file(log);
  return r;
}

void write(const std::string& name, const std::string& text) { std::ofstream(workdir() / name) << text; }

// Two well-separated tag families in 3 dimensions plus a pool over them.
void write_inputs() {
  write("tags.txt", "gcd\nlcm\nprime\nverb\nnoun\nadjective\n");
  write("emb.tsv",
        "dim=3 count=8\n"
        "gcd\t1 0.1 0\nlcm\t1 0.2 0\nprime\t0.9 0 0.1\n"
        "verb\t0 1 0.1\nnoun\t0.1 1 0\nadjective\t0 0.9 0.2\n"
        "divisor\t1 0.15 0\ngrammar\t0 1 0.05\n");
  write("pool.jsonl",
        R"({"id":"p1","query":"q","response":"r","tags":["gcd","divisor"],"quality":4,"complexity":2})"
        "\n"
        R"({"id":"p2","query":"q","response":"r","tags":["verb"],"quality":3,"complexity":5})"
        "\n"
        R"({"id":"p3","query":"q","response":"r","tags":["grammar","noun"],"quality":5,"complexity":1})"
        "\n"
        R"({"id":"p4","query":"q","response":"r","tags":["prime"],"quality":1,"complexity":3})"
        "\n");
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("end-to-end pipeline") {
    write_inputs();
    auto r = cli("build-tree --tags tags.txt --embeddings emb.tsv --depth 3 --clusters 2 --seed 7 --out tree.json");
    REQUIRE_MESSAGE(r.code == 0, r.output);
    CHECK(fs::exists(workdir() / "tree.json"));
    CHECK(fs::exists(workdir() / "tree.manifest.json"));
    const auto tree = load_tree(workdir() / "tree.json");
    CHECK(tree.leaf_count() == 6);

    // Reproducible from the same flags.
    const auto first_tree = read_file(workdir() / "tree.json");
    REQUIRE(cli("build-tree --tags tags.txt --embeddings emb.tsv --depth 3 --clusters 2 --seed 7 --out tree.json")
                .code == 0);
    CHECK(read_file(workdir() / "tree.json") == first_tree);

    const auto pool_digest = file_digest(workdir() / "pool.jsonl");
    r = cli("anchor --tree tree.json --pool pool.jsonl --embeddings emb.tsv --out anchored.jsonl");
    REQUIRE_MESSAGE(r.code == 0, r.output);
    CHECK(file_digest(workdir() / "pool.jsonl") == pool_digest);
    CHECK(fs::exists(workdir() / "anchored.manifest.json"));
    const auto anchored = load_anchored(workdir() / "anchored.jsonl");
    REQUIRE(anchored.size() == 4);
    for (const auto& a : anchored) CHECK(!a.leaves.empty());
    CHECK(anchored[0].quality == 0.75);  // min-max over {4,3,5,1}

    r = cli("sample --anchored anchored.jsonl --tree tree.json --budget 2 --pool pool.jsonl --out subset.jsonl "
            "--trace trace.json");
    REQUIRE_MESSAGE(r.code == 0, r.output);
    CHECK(r.output.find("picks: 2") != std::string::npos);
    CHECK(r.output.find("final_information") != std::string::npos);
    CHECK(load_instances(workdir() / "subset.jsonl").size() == 2);
    CHECK(fs::exists(workdir() / "subset.manifest.json"));
    CHECK(fs::exists(workdir() / "trace.json"));

    write("ref.jsonl", format_anchored(std::vector<AnchoredRecord>{anchored[1], anchored[2]}));
    r = cli("derive-target --reference ref.jsonl --tree tree.json --out target.json");
    REQUIRE_MESSAGE(r.code == 0, r.output);

    r = cli("sample --anchored anchored.jsonl --tree tree.json --budget 2 --lambda 5 --target target.json "
            "--out aligned.jsonl --trace aligned_trace.json");
    REQUIRE_MESSAGE(r.code == 0, r.output);
    CHECK(read_file(workdir() / "aligned_trace.json").find("\"mode\": \"aligned\"") != std::string::npos);
    // The cold-start pick is decided by the KL term alone, so it lands on the
    // reference leaves.
    const auto first = load_anchored(workdir() / "aligned.jsonl").front();
    bool on_target = false;
    for (const auto& ref : {anchored[1], anchored[2]})
      for (auto l : first.leaves) on_target |= std::find(ref.leaves.begin(), ref.leaves.end(), l) != ref.leaves.end();
    CHECK(on_target);

    r = cli("stats --input subset.jsonl --tree tree.json --target target.json");
    REQUIRE_MESSAGE(r.code == 0, r.output);
    CHECK(r.output.find("leaf_histogram") != std::string::npos);
    CHECK(r.output.find("kl: ") != std::string::npos);

    r = cli("sample --anchored anchored.jsonl --tree tree.json --budget 0 --out empty.jsonl --trace empty_trace.json");
    CHECK(r.code == 0);
    CHECK(read_file(workdir() / "empty.jsonl").empty());
    r = cli("stats --input empty.jsonl --tree tree.json --target target.json");
    CHECK(r.code == 0);
    CHECK(r.output.find("leaf_histogram: [0, 0, 0, 0, 0, 0]") != std::string::npos);
  }

  TEST_CASE("stats on the 3-node tree") {
    write("three.json", R"({"format":"tagforest-tree","version":1,"nodes":[
      {"id":0,"name":"r","parent":null,"children":[1,2],"depth":0},
      {"id":1,"name":"l1","parent":0,"children":[],"depth":1},
      {"id":2,"name":"l2","parent":0,"children":[],"depth":1}]})");
    write("both.jsonl", R"({"id":"a","leaves":[1],"quality":0.5,"complexity":0.5})"
                        "\n"
                        R"({"id":"b","leaves":[2],"quality":0.5,"complexity":0.5})"
                        "\n");
    auto r = cli("stats --input both.jsonl --tree three.json");
    CHECK(r.code == 0);
    CHECK(r.output.find("leaf_histogram: [1, 1]") != std::string::npos);
    CHECK(r.output.find("kl: ") == std::string::npos);
  }

  TEST_CASE("user errors exit with code 2") {
    write_inputs();
    auto r = cli("build-tree --tags tags.txt --embeddings nowhere.tsv --out t.json");
    CHECK(r.code == 2);
    CHECK(r.output.find("nowhere.tsv") != std::string::npos);

    REQUIRE(cli("build-tree --tags tags.txt --embeddings emb.tsv --depth 1 --out flat.json").code == 0);
    const auto flat = load_tree(workdir() / "flat.json");
    CHECK(flat.size() == 7);
    CHECK(flat.max_depth() == 1);

    REQUIRE(cli("anchor --tree flat.json --pool pool.jsonl --embeddings emb.tsv --out a.jsonl").code == 0);
    r = cli("sample --anchored a.jsonl --tree flat.json --budget 2 --lambda 5");
    CHECK(r.code == 2);
    CHECK(r.output.find("aligned mode requires target") != std::string::npos);

    CHECK(cli("anchor --tree flat.json --pool missing.jsonl").code == 2);
    write("bad.jsonl", "{\"id\": 1}\n");
    CHECK(cli("stats --input bad.jsonl --tree flat.json").code == 2);
    CHECK(cli("sample --tree flat.json").code == 2);
  }
}
