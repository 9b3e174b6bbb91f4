#include "ceurl/bench/checkpoint.hpp"

#include "ceurl/bench/records.hpp"

#include <cstdio>
#include <map>
#include <sstream>
#include <stdexcept>

namespace ceurl::bench {
namespace {

constexpr const char* kMagic = "ceurl-checkpoint";
constexpr int kFormat = 1;

class Writer {
 public:
  Writer(const std::string& kind, const std::string& stage) {
    out_ << kMagic << ' ' << kFormat << "\nkind " << kind << "\nstage " << stage << '\n';
  }
  void integer(const std::string& name, long v) { out_ << "int " << name << ' ' << v << '\n'; }
  void matrix(const std::string& name, const Eigen::MatrixXd& m) {
    out_ << "matrix " << name << ' ' << m.rows() << ' ' << m.cols() << '\n';
    char buf[32];
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index c = 0; c < m.cols(); ++c) {
        std::snprintf(buf, sizeof buf, "%.17g", m(r, c));
        out_ << (c ? " " : "") << buf;
      }
      out_ << '\n';
    }
  }
  void save(const std::filesystem::path& path) {
    out_ << "end\n";
    write_file_atomic(path, out_.str());
  }

 private:
  std::ostringstream out_;
};

struct Contents {
  std::string kind, stage;
  std::map<std::string, long> ints;
  std::map<std::string, Eigen::MatrixXd> matrices;

  long integer(const std::string& name) const {
    const auto it = ints.find(name);
    if (it == ints.end()) throw std::runtime_error("checkpoint: missing int " + name);
    return it->second;
  }
  const Eigen::MatrixXd& matrix(const std::string& name, Eigen::Index rows, Eigen::Index cols) const {
    const auto it = matrices.find(name);
    if (it == matrices.end()) throw std::runtime_error("checkpoint: missing matrix " + name);
    if (it->second.rows() != rows || it->second.cols() != cols)
      throw std::runtime_error("checkpoint: matrix " + name + " has shape " + std::to_string(it->second.rows()) +
                               "x" + std::to_string(it->second.cols()) + ", expected " + std::to_string(rows) + "x" +
                               std::to_string(cols));
    return it->second;
  }
};

Contents parse(const std::filesystem::path& path) {
  std::istringstream in(read_file(path));
  auto fail = [&](const std::string& what) { throw std::runtime_error(path.string() + ": " + what); };
  std::string magic;
  int format = 0;
  if (!(in >> magic >> format) || magic != kMagic) fail("not a checkpoint");
  if (format != kFormat) fail("unsupported checkpoint format " + std::to_string(format));
  Contents c;
  std::string tag;
  bool ended = false;
  while (in >> tag) {
    if (tag == "end") {
      ended = true;
      break;
    }
    if (tag == "kind") {
      in >> c.kind;
    } else if (tag == "stage") {
      in >> c.stage;
    } else if (tag == "int") {
      std::string name;
      long v = 0;
      if (!(in >> name >> v)) fail("bad int record");
      c.ints[name] = v;
    } else if (tag == "matrix") {
      std::string name;
      Eigen::Index rows = 0, cols = 0;
      if (!(in >> name >> rows >> cols) || rows < 0 || cols < 0) fail("bad matrix header");
      Eigen::MatrixXd m(rows, cols);
      for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index k = 0; k < cols; ++k) {
          std::string tok;
          if (!(in >> tok)) fail("truncated matrix " + name);
          m(r, k) = std::stod(tok);
        }
      c.matrices[name] = std::move(m);
    } else {
      fail("unknown record '" + tag + "'");
    }
  }
  if (!ended) fail("truncated checkpoint");
  return c;
}

Eigen::MatrixXd as_column(const Eigen::VectorXd& v) { return v; }

}  // namespace

void save_agent(const std::filesystem::path& path, const AgentState& st, const std::string& stage) {
  Writer w("agent", stage);
  w.integer("env_steps", st.env_steps);
  w.integer("rounds", st.rounds);
  w.matrix("probs", st.policy.probs);
  w.matrix("logits", st.logits);
  w.matrix("critic", as_column(st.critic));
  w.matrix("discriminator", st.discriminator.weights());
  if (st.skill_discriminator) w.matrix("skill_discriminator", st.skill_discriminator->weights());
  if (st.surprise) w.matrix("surprise_counts", st.surprise->counts());
  w.save(path);
}

AgentState load_agent(const std::filesystem::path& path, const EmbodimentSet& set, const TrainConfig& config) {
  const Contents c = parse(path);
  if (c.kind != "agent") throw std::runtime_error(path.string() + ": not an agent checkpoint");
  AgentState st = initial_state(set, config);
  st.env_steps = c.integer("env_steps");
  st.rounds = c.integer("rounds");
  st.policy.probs = c.matrix("probs", st.policy.probs.rows(), st.policy.probs.cols());
  st.logits = c.matrix("logits", st.logits.rows(), st.logits.cols());
  st.critic = c.matrix("critic", st.critic.size(), 1).col(0);
  auto& dw = st.discriminator.weights();
  dw = c.matrix("discriminator", dw.rows(), dw.cols());
  if (st.skill_discriminator) {
    auto& sw = st.skill_discriminator->weights();
    sw = c.matrix("skill_discriminator", sw.rows(), sw.cols());
  }
  if (st.surprise) {
    auto& counts = st.surprise->counts();
    counts = c.matrix("surprise_counts", counts.rows(), counts.cols());
  }
  st.validate();
  return st;
}

void save_controller(const std::filesystem::path& path, const MetaController& mc, const std::string& stage) {
  Writer w("controller", stage);
  w.integer("num_states", mc.num_states);
  w.integer("num_skills", mc.num_skills);
  w.integer("num_contexts", mc.num_contexts);
  w.matrix("logits", mc.logits);
  w.matrix("probs", mc.probs);
  w.matrix("critic", as_column(mc.critic));
  w.save(path);
}

MetaController load_controller(const std::filesystem::path& path) {
  const Contents c = parse(path);
  if (c.kind != "controller") throw std::runtime_error(path.string() + ": not a controller checkpoint");
  MetaController mc;
  mc.num_states = static_cast<int>(c.integer("num_states"));
  mc.num_skills = static_cast<int>(c.integer("num_skills"));
  mc.num_contexts = static_cast<int>(c.integer("num_contexts"));
  const Eigen::Index rows = static_cast<Eigen::Index>(mc.num_states) * mc.num_contexts;
  mc.logits = c.matrix("logits", rows, mc.num_skills);
  mc.probs = c.matrix("probs", rows, mc.num_skills);
  mc.critic = c.matrix("critic", rows, 1).col(0);
  mc.validate();
  return mc;
}

std::string checkpoint_stage(const std::filesystem::path& path) { return parse(path).stage; }

}  // namespace ceurl::bench
