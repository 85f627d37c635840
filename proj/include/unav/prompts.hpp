#pragma once

// Request bodies sent to a remote thought provider. Placeholders in angle
// brackets are substituted by fill_prompt().

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace unav::prompts {

inline constexpr std::string_view kEmbodiedThought = R"(You are a robot in an unfamiliar environment. Now I want you to give the reason for your action.

Your action can be in the following list:
- Based on the image, predict the optimal location to move next to finish the task. Use the coordinates (x, y) (x is the pixel from left to right and y is the pixel from top to bottom) to indicate where you want to move to: {"action_type": "move", "x": <position in horizontal (width)>, "y": <position in vertical (height)>}.
- Turn left: {"action_type": "turn_left"}.
- Turn right: {"action_type": "turn_right"}.
- Turn around: {"action_type": "turn_around"}.
- Move the camera angle downward: {"action_type": "look_down"}.
- Based on the image, if you find the target and the target is close enough, please stop to indicate that you want to stop: {"action_type": "stop"}.

You will be given the view before you performed the action (which has a text label "before" on the bottom right), the action you chose, and the task.

This is the action you performed: <action>
This is the task: <task> (the picture and action is one of the steps to finish the task)

By inspecting the picture and the action performed, give a brief reason of this step. You should carefully inspect the environment and give your analysis for why to do such action rather than other actions.

If moving to a position, explain why moving to that position based on the current environment. Avoid generic reasons like "get closer to the target."

NOTICES:
1. Coordinates are absolute coordinates (a center point defined by top-left and bottom-right coordinates).
2. If the action type is "move", the point will be labeled as "Next point" in the before image.
3. Remember that you should give the answer from a first-person perspective and keep it around 60 words and in a single line.
4. Don't limit yourself to begin with "I...". try any other possible sentence structure(like the position of exchangeing description and target) if not influence the meaning.)";

inline constexpr std::string_view kGuiThought = R"(You are an agent who can operate an Android phone on behalf of a user.
Now I want you to give the reason for your action.

You will be given the screenshot before you performed the action (which has a text label "before" on the bottom right), the action you chose (together with the reason), and the screenshot after the action was performed (which has a text label "after" on the bottom right).

This is the action you picked: <action>

This is the task: <task>
(The screenshots and action are one of the steps to finish the task)

This is the instruction: <instruction>
(The instruction to solve the task)

This is the related apps: <apps>
(Apps in the reason you output cannot go beyond the range of the app list)

By comparing the two screenshots and the action performed, give a brief reason of this step.
The reason should include the detailed description for the action and the target to do so, but avoid any description related to the after screenshot.

Requirements:
- Use first-person perspective.
- Keep the response around 60 words and in a single line.
- Do not begin every sentence with "I"; feel free to vary the structure as long as the meaning remains clear.)";

/// Replaces every "<name>" with its value.
inline std::string fill_prompt(std::string_view tmpl, const std::vector<std::pair<std::string, std::string>>& values) {
  std::string out(tmpl);
  for (const auto& [name, value] : values) {
    const std::string key = "<" + name + ">";
    for (std::size_t pos = out.find(key); pos != std::string::npos; pos = out.find(key, pos + value.size()))
      out.replace(pos, key.size(), value);
  }
  return out;
}

}  // namespace unav::prompts
