"""Prompt templates for the remote judge.

The similarity template takes per-field matching criteria and scoring guides;
``TEMPLATE_VERSION`` participates in the response-cache key, so bump it when
any template text changes.
"""

from __future__ import annotations

from .errors import TemplateMissing

TEMPLATE_VERSION = "1"

JUDGE_TEMPLATE = """You are an expert video script evaluator specializing in {field_name} matching.

Compare the Ground Truth (GT) with the Prediction (Pred) and provide a similarity score.

Ground Truth: "{gt_text}"

Prediction: "{pred_text}"

{matching_criteria}

{scoring_guide}

Task: Rate the semantic similarity between the GT and Pred descriptions.

Output strictly in JSON format:
{
    "similarity": <float between 0.0 and 1.0>,
    "reason": "Brief explanation in Chinese"
}"""

_ACTION_CRITERIA = """Criteria for matching:
- Focus on whether the prediction captures the general scene/situation.
- Allow significant paraphrasing, different perspectives, or partial descriptions.
- As long as the prediction is not contradictory and describes a related action/situation, consider it correct.
- Different granularity levels are acceptable (e.g., detailed vs. summary).
- Example: GT="Zhang San walked quickly to the door, pushed it open and went out" vs Pred="Zhang San left" -> Correct (Generalized description)
- Example: GT="Zhang San slammed the table angrily" vs Pred="Zhang San is very angry" -> Correct (Emotion-related)"""

_ACTION_GUIDE = """Scoring Guidance:
- 1.0: Match - describes the same general situation/scene
- 0.7-0.9: Good match - captures the essence, may differ in detail/perspective
- 0.4-0.6: Acceptable - related situation, different granularity
- 0.1-0.3: Marginal - tangentially related
- 0.0: No match - contradictory description"""

_AUDIO_CRITERIA = """Criteria for matching:
- Focus on whether the prediction captures the general audio atmosphere/category.
- Allow significant paraphrasing, different perspectives, or partial descriptions.
- As long as the prediction is not contradictory and describes related audio elements, consider it correct.
- Example: GT="Sound of breaking glass accompanied by a scream" vs Pred="Sound of breaking glass" -> Correct (Partial match)
- Example: GT="Tense background music" vs Pred="Soundtrack" -> Correct (Generalized description)"""

_AUDIO_GUIDE = """Scoring Guidance:
- 1.0: Match - describes the same general audio atmosphere
- 0.7-0.9: Good match - captures the essence, may differ in detail
- 0.4-0.6: Acceptable - related audio, different granularity
- 0.1-0.3: Marginal - tangentially related
- 0.0: No match - contradictory description"""

_EXPRESSION_CRITERIA = """Criteria for matching:
- Focus on whether the prediction captures the general emotional valence (positive/negative/neutral).
- Allow significant paraphrasing, different granularity, or partial descriptions.
- As long as the prediction is not contradictory in emotional direction, consider it correct.
- Example: GT="Anger, disappointment, pain" vs Pred="Negative emotion" -> Correct (Generalized description)
- Example: GT="Joy, excitement" vs Pred="Happy" -> Correct (Positive emotion)"""

_EXPRESSION_GUIDE = """Scoring Guidance:
- 1.0: Match - same emotional valence (positive/negative/neutral)
- 0.7-0.9: Good match - captures the general emotional tone
- 0.4-0.6: Acceptable - related emotional state, different granularity
- 0.1-0.3: Marginal - tangentially related emotions
- 0.0: No match - opposite emotional valence"""

_LOCATION_CRITERIA = """Criteria for matching:
- The prediction should capture the main location type and general setting.
- Allow reasonable paraphrasing and minor detail differences.
- Example: GT="Zhang San's bedroom" vs Pred="Bedroom" -> Correct (Core location consistent)
- Example: GT="Hospital corridor" vs Pred="Inside the hospital" -> Correct (Same broader scene)"""

_LOCATION_GUIDE = """Scoring Guidance:
- 1.0: Excellent match - same location, may have minor detail differences
- 0.7-0.9: Good match - core location matches, reasonable paraphrasing
- 0.4-0.6: Partial match - same general area/building
- 0.1-0.3: Weak match - loosely related location
- 0.0: No match - completely different location"""

_TYPE_CRITERIA = """Criteria for matching:
- Same as strict for this field, as type is categorical.
- Synonyms are allowed: "Interior" == "Int", "Exterior" == "Ext\""""

_TYPE_GUIDE = """Scoring Guidance:
- 1.0: Match - same scene type (synonyms allowed)
- 0.0: No match - different scene type"""

_ENVIRONMENT_CRITERIA = """Criteria for matching:
- The prediction should capture the main environmental characteristics.
- Allow missing minor details if the core atmosphere is correct.
- Example: GT="Dim lighting, shabby furniture" vs Pred="Dim and shabby environment" -> Correct"""

_ENVIRONMENT_GUIDE = """Scoring Guidance:
- 1.0: Excellent match - same environmental atmosphere
- 0.7-0.9: Good match - core environment matches
- 0.4-0.6: Partial match - related atmosphere
- 0.1-0.3: Weak match - loosely related
- 0.0: No match - contradictory environment"""

_TIME_CRITERIA = """Criteria for matching:
- Same as strict for this field, as time is categorical.
- Allow synonyms and reasonable time period mappings."""

_TIME_GUIDE = """Scoring Guidance:
- 1.0: Match - same time period (synonyms allowed)
- 0.0: No match - different time period"""

_MOOD_CRITERIA = """Criteria for matching:
- The prediction should capture the main mood and its general tone.
- Allow missing minor mood elements if the core atmosphere is correct.
- Example: GT="Tense, oppressive" vs Pred="Tense and uneasy" -> Correct (Core mood consistent)"""

_MOOD_GUIDE = """Scoring Guidance:
- 1.0: Excellent match - same mood tone
- 0.7-0.9: Good match - core mood matches
- 0.4-0.6: Partial match - related emotional tone
- 0.1-0.3: Weak match - loosely related
- 0.0: No match - contradictory mood"""

# field key -> (display name, matching criteria, scoring guide)
FIELD_PROMPTS: dict[str, tuple[str, str, str]] = {
    "action": ("action", _ACTION_CRITERIA, _ACTION_GUIDE),
    "audio_cue": ("audio cue", _AUDIO_CRITERIA, _AUDIO_GUIDE),
    "expression": ("expression", _EXPRESSION_CRITERIA, _EXPRESSION_GUIDE),
    "scene_location": ("scene location", _LOCATION_CRITERIA, _LOCATION_GUIDE),
    "scene_type": ("scene type", _TYPE_CRITERIA, _TYPE_GUIDE),
    "scene_environment": ("scene environment", _ENVIRONMENT_CRITERIA, _ENVIRONMENT_GUIDE),
    "scene_time": ("scene time", _TIME_CRITERIA, _TIME_GUIDE),
    "scene_mood": ("scene mood", _MOOD_CRITERIA, _MOOD_GUIDE),
}


def render_judge_prompt(field_kind: str, gt_text: str, pred_text: str) -> str:
    """Similarity prompt for one field comparison."""
    if field_kind not in FIELD_PROMPTS:
        raise TemplateMissing(f"no judge template for field {field_kind!r}")
    field_name, criteria, guide = FIELD_PROMPTS[field_kind]
    out = JUDGE_TEMPLATE
    for placeholder, value in (
        ("{field_name}", field_name),
        ("{gt_text}", gt_text),
        ("{pred_text}", pred_text),
        ("{matching_criteria}", criteria),
        ("{scoring_guide}", guide),
    ):
        out = out.replace(placeholder, value)
    return out


CHARACTER_MAPPING_TEMPLATE = """You are an expert in character name classification and matching. Please complete all the following tasks:

## Input
Ground Truth Character List: [{gt_str}]
Prediction Character List: [{pred_str}]

## Task 1: Character Name Classification
Categorize the character names in both lists into two categories:

**Proper Names (proper_names)**: Real human names, including:
- Chinese/Personal names (e.g., Zhang San, Li Ming, Jin Runfa)
- Title variants (e.g., Old Jin, Mr. Jin, Boss Jin are all variants of a person's name)
- Foreign names (e.g., John, Mary)
- Names with surname + occupation (e.g., Dr. Wang, Teacher Zhang, Officer Li) - although these contain occupational info, they are still classified as proper names.

**Identity Names/Pronouns (identity_names)**: Non-name character identifiers, including:
- Occupational identities (e.g., soldier, nurse, doctor, police)
- Social roles (e.g., passerby, customer, boss)
- Descriptive pronouns (e.g., fatty, tall guy, lady, old man)
- Relational terms (e.g., mom, grandpa, unless explicitly used as a proper name)
- Numbered characters (e.g., Soldier A, Passerby B)

## Task 2: Identity Name Plurality Classification

For the identity names categorized in Task 1, further distinguish between **singular identity names** and **plural identity names**:

**Singular Identity Names (singular_identities)**: Refers to a single character.
- Examples: soldier, nurse, doctor, police, passerby, lady, old man, fatty

**Plural Identity Names (plural_identities)**: Refers to multiple characters (a group).
- With plural suffixes: soldiers, nurses, students, audiences
- With quantifiers: the crowd, a group of people, two soldiers
- Group vocabulary: crowd, masses, everyone, all soldiers
- With 'et al.' or 'and others' suffix: Zhang San and others

## Task 3: Proper Name Matching

For the classified proper names, determine which proper name in the Prediction refers to the same person as a proper name in the GT (could be aliases/title variants).

Matching rules:
- The same person might have different titles: Old Jin, Mr. Jin, Boss Jin, Jin Runfa → Same person
- Surname + occupation variants: Dr. Wang vs. Physician Wang → Likely the same person
- **Allow many-to-one**: Multiple Pred names can match the same GT name.
- Do not forcibly match different proper names (Zhang San vs. Li Si → Different people).

## Task 4: Identity Name Conflict Detection
For the classified identity names, detect which Prediction identity names are **incompatible** (cannot be the same character) with which GT identity names.

Incompatibility judgment rules:
1. **Gender conflict**: Lady vs. Gentleman → Incompatible
2. **Opposing identities**: Police vs. Thief, Customer vs. Waiter → Incompatible
3. **Inconsistent function/domain**: Security Guard vs. Nurse, Driver vs. Chef → Incompatible

Compatible situations (not considered conflicts):
- Same domain, different levels: Soldier vs. Officer
- Same domain, different positions: Nurse vs. Doctor
- Generic vs. Specific: Lady vs. Nurse
- Synonyms: Passerby vs. Pedestrian

## Task 5: Cross-type Conflict Detection (Important!)

Detect occupational conflicts between **proper names containing occupational info** and **identity names**.

Examples:
- "Dr. Wang" (Proper name, occupation=Doctor) vs. "Police" (Identity name) → Incompatible (Doctor ≠ Police)
- "Teacher Zhang" (Proper name, occupation=Teacher) vs. "Nurse" (Identity name) → Incompatible (Teacher ≠ Nurse)
- "Officer Li" (Proper name, occupation=Police) vs. "Security Guard" (Identity name) → Compatible (Both in security domain)
- "Dr. Wang" (Proper name, occupation=Doctor) vs. "Nurse" (Identity name) → Compatible (Both in medical domain)

This detection prevents fallback matching from incorrectly mapping occupational proper names to unrelated identity names.

## Output Format
Please strictly output in the following JSON format:

```json
{
    "gt_classification": {
        "proper_names": ["List of GT proper names"],
        "identity_names": ["List of GT identity names"]
    },
    "pred_classification": {
        "proper_names": ["List of Pred proper names"],
        "identity_names": ["List of Pred identity names"]
    },
    "gt_identity_plurality": {
        "singular": ["GT singular identity names"],
        "plural": ["GT plural identity names"]
    },
    "pred_identity_plurality": {
        "singular": ["Pred singular identity names"],
        "plural": ["Pred plural identity names"]
    },
    "proper_name_mappings": {
        "pred_proper_name_1": "matched_gt_proper_name_or_null",
        "pred_proper_name_2": "matched_gt_proper_name_or_null"
    },
    "identity_conflicts": {
        "pred_identity_1": ["incompatible_gt_identity_1", "incompatible_gt_identity_2"],
        "pred_identity_2": ["incompatible_gt_identity_3"]
    },
    "cross_type_conflicts": {
        "pred_proper_name_with_occupation": ["incompatible_gt_identity_1", "incompatible_gt_identity_2"],
        "gt_proper_name_with_occupation": ["incompatible_pred_identity_1"]
    }
}
```

Notes:
- All character names must appear in the classification results (proper_names or identity_names).
- All identity names must appear in the plurality classification (singular or plural).
- proper_name_mappings only contains Pred's proper names, with values being the matched GT name or null.
- identity_conflicts only contains conflicts between Pred identity names and GT identity names.
- cross_type_conflicts contains conflicts between occupational proper names and opposing identity names (bidirectional detection):
- Pred occupational proper names vs. GT identity names
- GT occupational proper names vs. Pred identity names"""


def render_character_mapping_prompt(gt_names: list[str], pred_names: list[str]) -> str:
    """Name classification/mapping prompt over the two character inventories."""
    gt_str = ", ".join(f'"{n}"' for n in gt_names)
    pred_str = ", ".join(f'"{n}"' for n in pred_names)
    return (CHARACTER_MAPPING_TEMPLATE
            .replace("{gt_str}", gt_str)
            .replace("{pred_str}", pred_str))
