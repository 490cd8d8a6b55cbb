#pragma once

#include <memory>

#include "recourse/model/gateway.hpp"
#include "recourse/scoring/scorer.hpp"
#include "recourse/session/config.hpp"

namespace recourse::session {

// "lexicon" loads lexicon_path; "perspective" reads the API key from the
// environment variable named by api_key_env. Throws Error(InvalidConfig).
std::shared_ptr<const scoring::Scorer> make_scorer(const ScorerSpec& spec);

// "echo", "scripted" (script_path, errors once exhausted) or "remote"
// (token from auth_token_env). Throws Error(InvalidConfig).
std::shared_ptr<model::ChatModel> make_model(const ModelSpec& spec);

}  // namespace recourse::session
