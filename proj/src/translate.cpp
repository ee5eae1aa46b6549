#include "codemix/translate.hpp"

#include <fcntl.h>
#include <poll.h>
#include <pthread.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <fstream>
#include <sstream>

#include "codemix/error.hpp"
#include "codemix/hash.hpp"
#include "codemix/strings.hpp"

extern char** environ;

namespace codemix {

// ---------------------------------------------------------------------------
// Spec

TranslatorSpec TranslatorSpec::identity() { return {}; }

TranslatorSpec TranslatorSpec::dictionary(std::string path) {
  TranslatorSpec s;
  s.kind = TranslatorKind::Dictionary;
  s.dictionary_path = std::move(path);
  return s;
}

TranslatorSpec TranslatorSpec::external(std::vector<std::string> argv) {
  TranslatorSpec s;
  s.kind = TranslatorKind::ExternalCommand;
  s.command = std::move(argv);
  return s;
}

void TranslatorSpec::validate() const {
  switch (kind) {
    case TranslatorKind::ExternalCommand:
      if (command.empty() || command.front().empty()) {
        throw ConfigError("external translator requires a command");
      }
      break;
    case TranslatorKind::Dictionary: {
      if (dictionary_path.empty()) {
        throw ConfigError("dictionary translator requires a dictionary path");
      }
      std::ifstream probe(dictionary_path);
      if (!probe) {
        throw ConfigError("cannot read dictionary " + dictionary_path);
      }
      break;
    }
    case TranslatorKind::Identity:
      break;
  }
}

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

std::string TranslatorSpec::id() const {
  std::string key;
  switch (kind) {
    case TranslatorKind::ExternalCommand:
      key = "cmd";
      for (const auto& a : command) {
        key.push_back('\0');
        key += a;
      }
      break;
    case TranslatorKind::Dictionary:
      key = "dict";
      key.push_back('\0');
      key += hex64(fnv1a64(read_file(dictionary_path)));
      break;
    case TranslatorKind::Identity:
      key = "identity";
      break;
  }
  return hex64(fnv1a64(key));
}

// ---------------------------------------------------------------------------
// Dictionary

Dictionary load_dictionary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read dictionary " + path);
  Dictionary dict;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split(line, '\t');
    if (f.size() != 2 || f[0].empty()) {
      throw ParseError(lineno, "expected source<TAB>target");
    }
    dict[std::string(f[0])] = std::string(f[1]);
  }
  return dict;
}

std::string dictionary_translate(std::string_view text,
                                 const Dictionary& dict) {
  std::string out;
  std::size_t i = 0;
  while (i < text.size()) {
    const std::size_t sep_begin = i;
    while (i < text.size() && is_space(text[i])) ++i;
    out.append(text.substr(sep_begin, i - sep_begin));
    const std::size_t b = i;
    while (i < text.size() && !is_space(text[i])) ++i;
    if (i == b) break;
    const std::string tok(text.substr(b, i - b));
    const auto it = dict.find(tok);
    out += it == dict.end() ? tok : it->second;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Cache

namespace {

std::string escape_field(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '\t': out += "\\t"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

std::string unescape_field(std::string_view s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '\\' || i + 1 == s.size()) {
      out.push_back(s[i]);
      continue;
    }
    switch (s[++i]) {
      case 't': out.push_back('\t'); break;
      case 'n': out.push_back('\n'); break;
      case 'r': out.push_back('\r'); break;
      default: out.push_back(s[i]);
    }
  }
  return out;
}

}  // namespace

TranslationCache::TranslationCache(std::string path) : path_(std::move(path)) {
  std::ifstream in(path_, std::ios::binary);
  if (!in) return;  // first run
  std::string line;
  while (std::getline(in, line)) {
    const auto f = split(line, '\t');
    // A torn final line from an interrupted run is ignored.
    if (f.size() != 3) continue;
    entries_[key(std::string(f[0]), std::string(f[1]))] = unescape_field(f[2]);
  }
}

std::string TranslationCache::key(const std::string& id,
                                  const std::string& hash) {
  return id + '\t' + hash;
}

std::optional<std::string> TranslationCache::lookup(
    const std::string& translator_id, const std::string& source_hash) const {
  std::lock_guard lock(mu_);
  const auto it = entries_.find(key(translator_id, source_hash));
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void TranslationCache::insert(const std::string& translator_id,
                              const std::string& source_hash,
                              const std::string& translation) {
  std::lock_guard lock(mu_);
  const auto [it, fresh] =
      entries_.emplace(key(translator_id, source_hash), translation);
  if (!fresh || path_.empty()) return;
  std::ofstream out(path_, std::ios::binary | std::ios::app);
  if (!out) throw TranslationError("cannot append to cache " + path_);
  out << translator_id << '\t' << source_hash << '\t'
      << escape_field(translation) << '\n';
}

std::size_t TranslationCache::size() const {
  std::lock_guard lock(mu_);
  return entries_.size();
}

std::string sanitize_for_protocol(std::string_view text) {
  std::string out(text);
  for (char& c : out) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  return out;
}

std::string source_hash(std::string_view sanitized_text) {
  return hex64(fnv1a64(sanitized_text));
}

// ---------------------------------------------------------------------------
// Child process

namespace {

class Fd {
 public:
  Fd() = default;
  explicit Fd(int fd) : fd_(fd) {}
  Fd(const Fd&) = delete;
  Fd& operator=(const Fd&) = delete;
  Fd(Fd&& o) noexcept : fd_(o.release()) {}
  ~Fd() { reset(); }

  int get() const { return fd_; }
  int release() {
    const int fd = fd_;
    fd_ = -1;
    return fd;
  }
  void reset() {
    if (fd_ >= 0) ::close(fd_);
    fd_ = -1;
  }

 private:
  int fd_ = -1;
};

struct Pipe {
  Fd read, write;
};

Pipe make_pipe() {
  int fds[2];
  if (::pipe2(fds, O_CLOEXEC) != 0) {
    throw TranslationError(std::string("pipe: ") + std::strerror(errno));
  }
  return Pipe{Fd(fds[0]), Fd(fds[1])};
}

// Blocks SIGPIPE on this thread for the lifetime of the guard and discards
// any instance raised meanwhile, so a dying child surfaces as EPIPE.
class SigpipeGuard {
 public:
  SigpipeGuard() {
    sigemptyset(&set_);
    sigaddset(&set_, SIGPIPE);
    pthread_sigmask(SIG_BLOCK, &set_, &old_);
  }
  ~SigpipeGuard() {
    timespec zero{0, 0};
    while (sigtimedwait(&set_, nullptr, &zero) > 0) {
    }
    pthread_sigmask(SIG_SETMASK, &old_, nullptr);
  }

 private:
  sigset_t set_, old_;
};

std::string describe_status(int status) {
  if (WIFEXITED(status)) {
    return "exited with status " + std::to_string(WEXITSTATUS(status));
  }
  if (WIFSIGNALED(status)) {
    return "terminated by signal " + std::to_string(WTERMSIG(status));
  }
  return "ended abnormally";
}

std::string command_line(const std::vector<std::string>& argv) {
  std::string out;
  for (const auto& a : argv) {
    if (!out.empty()) out.push_back(' ');
    out += a;
  }
  return out;
}

}  // namespace

std::vector<std::string> run_line_filter(
    const std::vector<std::string>& argv,
    const std::vector<std::string>& lines) {
  if (argv.empty()) throw ConfigError("run_line_filter: empty command");

  std::string input;
  for (const auto& l : lines) {
    input += sanitize_for_protocol(l);
    input.push_back('\n');
  }

  SigpipeGuard sigpipe;
  Pipe in = make_pipe(), out = make_pipe(), err = make_pipe();

  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_adddup2(&actions, in.read.get(), 0);
  posix_spawn_file_actions_adddup2(&actions, out.write.get(), 1);
  posix_spawn_file_actions_adddup2(&actions, err.write.get(), 2);

  std::vector<char*> cargv;
  for (const auto& a : argv) cargv.push_back(const_cast<char*>(a.c_str()));
  cargv.push_back(nullptr);

  pid_t pid = -1;
  const int rc =
      posix_spawnp(&pid, cargv[0], &actions, nullptr, cargv.data(), environ);
  posix_spawn_file_actions_destroy(&actions);
  if (rc != 0) {
    throw TranslationError("cannot start translator '" + command_line(argv) +
                           "': " + std::strerror(rc));
  }
  in.read.reset();
  out.write.reset();
  err.write.reset();
  ::fcntl(in.write.get(), F_SETFL, O_NONBLOCK);

  std::string stdout_data, stderr_data;
  std::size_t written = 0;
  if (input.empty()) in.write.reset();
  char buf[65536];
  while (out.read.get() >= 0 || err.read.get() >= 0) {
    pollfd fds[3];
    nfds_t n = 0;
    int idx_in = -1, idx_out = -1, idx_err = -1;
    if (in.write.get() >= 0) {
      idx_in = static_cast<int>(n);
      fds[n++] = {in.write.get(), POLLOUT, 0};
    }
    if (out.read.get() >= 0) {
      idx_out = static_cast<int>(n);
      fds[n++] = {out.read.get(), POLLIN, 0};
    }
    if (err.read.get() >= 0) {
      idx_err = static_cast<int>(n);
      fds[n++] = {err.read.get(), POLLIN, 0};
    }
    if (::poll(fds, n, -1) < 0) {
      if (errno == EINTR) continue;
      break;
    }
    if (idx_in >= 0 && fds[idx_in].revents) {
      const ssize_t w = ::write(in.write.get(), input.data() + written,
                                input.size() - written);
      if (w > 0) written += static_cast<std::size_t>(w);
      if (w < 0 && errno != EAGAIN && errno != EINTR) {
        in.write.reset();  // EPIPE: the child stopped reading
      } else if (written == input.size()) {
        in.write.reset();
      }
    }
    auto drain = [&](int idx, Fd& fd, std::string& sink) {
      if (idx < 0 || !fds[idx].revents) return;
      const ssize_t r = ::read(fd.get(), buf, sizeof buf);
      if (r > 0) {
        sink.append(buf, static_cast<std::size_t>(r));
      } else if (r == 0 || (errno != EAGAIN && errno != EINTR)) {
        fd.reset();
      }
    };
    drain(idx_out, out.read, stdout_data);
    drain(idx_err, err.read, stderr_data);
  }
  in.write.reset();

  int status = 0;
  while (::waitpid(pid, &status, 0) < 0 && errno == EINTR) {
  }
  if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) {
    std::string msg = "translator '" + command_line(argv) + "' " +
                      describe_status(status);
    const auto diag = trim(stderr_data);
    if (!diag.empty()) msg += ": " + std::string(diag.substr(0, 2000));
    throw TranslationError(msg);
  }

  std::vector<std::string> result;
  std::size_t b = 0;
  for (std::size_t i = 0; i < stdout_data.size(); ++i) {
    if (stdout_data[i] == '\n') {
      std::string line = stdout_data.substr(b, i - b);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      result.push_back(std::move(line));
      b = i + 1;
    }
  }
  if (b < stdout_data.size()) result.push_back(stdout_data.substr(b));
  if (result.size() != lines.size()) {
    throw ProtocolError("translator '" + command_line(argv) + "' returned " +
                        std::to_string(result.size()) + " lines for " +
                        std::to_string(lines.size()) + " inputs");
  }
  return result;
}

// ---------------------------------------------------------------------------
// Batch translation

std::vector<Sample> translate_batch(const std::vector<Sample>& samples,
                                    const TranslatorSpec& spec,
                                    TranslationCache* cache,
                                    TranslateStats* stats) {
  spec.validate();
  const std::string id = spec.id();
  TranslateStats local;

  std::vector<std::string> sources(samples.size());
  std::vector<std::string> hashes(samples.size());
  std::vector<std::optional<std::string>> translations(samples.size());
  std::vector<std::size_t> misses;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    sources[i] = sanitize_for_protocol(samples[i].text);
    hashes[i] = source_hash(sources[i]);
    if (cache) translations[i] = cache->lookup(id, hashes[i]);
    if (translations[i]) {
      ++local.cache_hits;
    } else {
      misses.push_back(i);
    }
  }

  if (!misses.empty()) {
    std::vector<std::string> fresh;
    fresh.reserve(misses.size());
    switch (spec.kind) {
      case TranslatorKind::Identity:
        for (std::size_t i : misses) fresh.push_back(sources[i]);
        break;
      case TranslatorKind::Dictionary: {
        const Dictionary dict = load_dictionary(spec.dictionary_path);
        for (std::size_t i : misses) {
          fresh.push_back(dictionary_translate(sources[i], dict));
        }
        break;
      }
      case TranslatorKind::ExternalCommand: {
        const std::size_t chunk =
            spec.chunk_size == 0 ? misses.size() : spec.chunk_size;
        for (std::size_t b = 0; b < misses.size(); b += chunk) {
          const std::size_t e = std::min(misses.size(), b + chunk);
          std::vector<std::string> lines;
          for (std::size_t j = b; j < e; ++j) lines.push_back(sources[misses[j]]);
          ++local.invocations;
          auto got = run_line_filter(spec.command, lines);
          for (auto& g : got) fresh.push_back(std::move(g));
        }
        break;
      }
    }
    local.translated = misses.size();
    for (std::size_t j = 0; j < misses.size(); ++j) {
      const std::size_t i = misses[j];
      if (cache) cache->insert(id, hashes[i], fresh[j]);
      translations[i] = std::move(fresh[j]);
    }
  }

  std::vector<Sample> out;
  out.reserve(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    Sample s = samples[i];
    s.text = trim(*translations[i]).empty() ? sources[i] : *translations[i];
    s.provenance = Provenance::Translated;
    out.push_back(std::move(s));
  }
  if (stats) {
    stats->invocations += local.invocations;
    stats->cache_hits += local.cache_hits;
    stats->translated += local.translated;
  }
  return out;
}

Corpus translate_corpus(const Corpus& corpus, const TranslatorSpec& spec,
                        TranslationCache* cache, TranslateStats* stats) {
  return Corpus{corpus.language, corpus.split,
                translate_batch(corpus.samples, spec, cache, stats)};
}

}  // namespace codemix
