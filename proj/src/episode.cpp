#include "mcon/episode.hpp"

#include "mcon/design_io.hpp"
#include "mcon/hash.hpp"

namespace mcon {

namespace {

using nlohmann::json;

json pose_json(Pose p) { return json::array({p.x, p.y}); }

Pose pose_from(const json& j) {
  if (!j.is_array() || j.size() != 2) throw RecordError(RecordError::Kind::Malformed, "pose must be [x, y]");
  return {j.at(0).get<int>(), j.at(1).get<int>()};
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    const std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) {
      lines.push_back(text.substr(start));
      break;
    }
    lines.push_back(text.substr(start, end - start));
    start = end + 1;
  }
  return lines;
}

json parse_line(std::string_view line, std::size_t index) {
  auto j = json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object())
    throw RecordError(RecordError::Kind::Malformed, "line " + std::to_string(index + 1) + " is not a JSON object");
  return j;
}

std::string footer_body(const EpisodeRecord& r) {
  json f = {{"type", "footer"},
            {"final_grid", grid_to_json(r.final_grid)},
            {"iou", r.iou},
            {"done_reason", std::string(to_string(r.done_reason))}};
  if (r.error) f["error"] = *r.error;
  return f.dump();
}

}  // namespace

std::string config_hash(const EnvConfig& cfg) {
  return "fnv1a64:" + hex64(fnv1a64(std::string(kRecordFormat) + "|" + to_json(cfg).dump()));
}

std::uint64_t agent_seed(std::uint64_t episode_seed) { return derive_seed(episode_seed, 2); }

EpisodeRecord run_episode(const EnvConfig& cfg, std::shared_ptr<const Design> design, Agent& agent, std::string task) {
  EnvState state = reset(cfg, design);

  EpisodeRecord rec;
  rec.task = std::move(task);
  rec.agent = std::string(agent.name());
  rec.agent_params = agent.params();
  rec.cfg = cfg;
  rec.design = *design;
  rec.initial_pose = state.pose;

  AgentContext ctx{cfg, cfg.variant == Variant::Static ? design : nullptr, state.pose, agent_seed(cfg.seed)};
  agent.reset(ctx);
  ObservationPacket obs = observe(state, cfg);

  while (!state.done) {
    Action action;
    try {
      action = agent.act(obs);
    } catch (const std::exception& e) {
      rec.error = std::string("agent failure: ") + e.what();
      break;
    }
    if (!is_legal(action, cfg.dim)) {
      rec.error = "agent returned illegal action " + std::string(to_string(action));
      break;
    }
    StepOutcome out = step(state, action, cfg);
    rec.steps.push_back({state.n_steps, state.pose, action, out.sampled_distance, out.reward, state.n_bricks});
    agent.notify(out);
    obs = std::move(out.observation);
  }

  rec.final_grid = state.grid.cells;
  rec.iou = iou(state.grid, *design);
  rec.done_reason = state.done_reason;
  return rec;
}

std::string record_to_text(const EpisodeRecord& r) {
  std::string out;
  const json header = {{"type", "header"},
                       {"format", std::string(kRecordFormat)},
                       {"task", r.task},
                       {"agent", r.agent},
                       {"agent_params", r.agent_params},
                       {"seed", r.cfg.seed},
                       {"config", to_json(r.cfg)},
                       {"config_hash", config_hash(r.cfg)},
                       {"design", design_to_json(r.design)},
                       {"design_hash", design_hash(r.design)},
                       {"initial_pose", pose_json(r.initial_pose)}};
  out += header.dump();
  out += '\n';
  for (const auto& s : r.steps) {
    const json line = {{"type", "step"},
                       {"Ns", s.n_steps},
                       {"pose", pose_json(s.pose)},
                       {"action", std::string(to_string(s.action))},
                       {"d", s.sampled_distance},
                       {"reward", s.reward},
                       {"Nb", s.n_bricks}};
    out += line.dump();
    out += '\n';
  }
  const std::string body = footer_body(r);
  json footer = json::parse(body);
  footer["digest"] = "fnv1a64:" + hex64(fnv1a64(body, fnv1a64(out)));
  out += footer.dump();
  out += '\n';
  return out;
}

EpisodeRecord record_from_text(std::string_view text) {
  using Kind = RecordError::Kind;
  const auto lines = split_lines(text);
  if (lines.size() < 2) throw RecordError(Kind::Malformed, "record needs at least a header and a footer");

  EpisodeRecord r;
  try {
    const json header = parse_line(lines.front(), 0);
    if (header.at("type") != "header") throw RecordError(Kind::Malformed, "first line is not a header");
    const auto format = header.at("format").get<std::string>();
    if (format != kRecordFormat)
      throw RecordError(Kind::Incompatible, "record format " + format + " is not " + std::string(kRecordFormat));
    try {
      r.cfg = env_config_from_json(header.at("config"));
    } catch (const ContractError& e) {
      throw RecordError(Kind::Malformed, std::string("bad config: ") + e.what());
    }
    if (header.at("config_hash").get<std::string>() != config_hash(r.cfg))
      throw RecordError(Kind::Incompatible, "config hash " + header.at("config_hash").get<std::string>() +
                                                " does not match this build's " + config_hash(r.cfg));
    if (header.at("seed").get<std::uint64_t>() != r.cfg.seed)
      throw RecordError(Kind::Malformed, "header seed disagrees with config seed");
    r.task = header.at("task").get<std::string>();
    r.agent = header.at("agent").get<std::string>();
    r.agent_params = header.at("agent_params");
    try {
      r.design = design_from_json(header.at("design"));
    } catch (const ContractError& e) {
      throw RecordError(Kind::Malformed, e.what());
    }
    if (header.at("design_hash").get<std::string>() != design_hash(r.design))
      throw RecordError(Kind::Malformed, "design hash mismatch");
    r.initial_pose = pose_from(header.at("initial_pose"));

    for (std::size_t i = 1; i + 1 < lines.size(); ++i) {
      const json s = parse_line(lines[i], i);
      if (s.at("type") != "step") throw RecordError(Kind::Malformed, "line " + std::to_string(i + 1) + " is not a step");
      r.steps.push_back({s.at("Ns").get<int>(), pose_from(s.at("pose")), action_from_string(s.at("action").get<std::string>()),
                         s.at("d").get<int>(), s.at("reward").get<int>(), s.at("Nb").get<int>()});
    }

    const json footer = parse_line(lines.back(), lines.size() - 1);
    if (footer.at("type") != "footer") throw RecordError(Kind::Malformed, "last line is not a footer");
    r.final_grid = grid_from_json(footer.at("final_grid"), r.cfg.width, r.cfg.height);
    r.iou = footer.at("iou").get<double>();
    r.done_reason = done_reason_from_string(footer.at("done_reason").get<std::string>());
    if (footer.contains("error")) r.error = footer.at("error").get<std::string>();
    footer.at("digest").get<std::string>();
  } catch (const json::exception& e) {
    throw RecordError(Kind::Malformed, std::string("malformed record: ") + e.what());
  } catch (const ContractError& e) {
    throw RecordError(Kind::Malformed, std::string("malformed record: ") + e.what());
  }
  return r;
}

void write_record(const std::filesystem::path& path, const EpisodeRecord& record) {
  write_text_file(path, record_to_text(record));
}

EpisodeRecord read_record(const std::filesystem::path& path) { return record_from_text(read_text_file(path)); }

}  // namespace mcon
