from scenescore.screenplay import (
    DEFAULT_DIALOGUE_MARGIN,
    ElementKind,
    classify_line,
    classify_lines,
    clean_tokens,
    extract_meaningful_text,
    parse_script,
    scenes_to_dict,
    serialize_elements,
    split_sentences,
)

BLANK = ElementKind.BLANK
ACTION = ElementKind.ACTION
CUE = ElementKind.CHARACTER_CUE
DIALOGUE = ElementKind.DIALOGUE


class TestClassifyLine:
    def test_blank_variants(self):
        assert classify_line("", BLANK) is BLANK
        assert classify_line("   \t  ", ACTION) is BLANK

    def test_heading_prefixes(self):
        for text in (
            "INT. KITCHEN - DAY",
            "EXT. STREET - NIGHT",
            "INT./EXT. CAR - DUSK",
            "I/E. TRAIN - DAWN",
            "   EXT. BEACH - DAY",
        ):
            assert classify_line(text, BLANK) is ElementKind.SCENE_HEADING, text

    def test_heading_prefix_needs_period(self):
        assert classify_line("INTO the woods she went.", BLANK) is ACTION
        assert classify_line("EXTREME close-up on the lock.", BLANK) is ACTION

    def test_transitions(self):
        assert classify_line("CUT TO:", ACTION) is ElementKind.TRANSITION
        assert (
            classify_line(" " * 40 + "SMASH CUT TO:", BLANK)
            is ElementKind.TRANSITION
        )
        assert classify_line("FADE IN:", BLANK) is ElementKind.TRANSITION
        assert classify_line("FADE OUT.", BLANK) is ElementKind.TRANSITION

    def test_cue_requires_upper_indent_and_context(self):
        line = " " * 22 + "MARA"
        assert classify_line(line, BLANK) is CUE
        assert classify_line(line, ACTION) is CUE
        # After a cue or dialogue the same text reads as dialogue instead.
        assert classify_line(line, CUE) is DIALOGUE
        assert classify_line(line, DIALOGUE) is DIALOGUE

    def test_cue_rejections(self):
        assert classify_line("MARA", BLANK) is ACTION  # indent too small
        assert classify_line(" " * 22 + "Mara", BLANK) is ACTION  # not upper
        long_name = " " * 22 + "A" * 41
        assert classify_line(long_name, BLANK) is ACTION  # over 40 chars
        assert classify_line(" " * 22 + "...", BLANK) is ACTION  # no letters

    def test_cue_with_extension_is_allowed(self):
        line = " " * 22 + "RADIO VOICE (V.O.)"
        assert classify_line(line, BLANK) is CUE

    def test_parenthetical_context(self):
        line = " " * 16 + "(beat)"
        assert classify_line(line, CUE) is ElementKind.PARENTHETICAL
        assert classify_line(line, DIALOGUE) is ElementKind.PARENTHETICAL
        # Outside speech context a parenthesized line is just action.
        assert classify_line("(A beat.)", BLANK) is ACTION

    def test_dialogue_needs_margin(self):
        assert classify_line(" " * 10 + "Hello there.", CUE) is DIALOGUE
        assert classify_line(" " * 9 + "Hello there.", CUE) is ACTION
        assert classify_line(" " * 10 + "Hello there.", BLANK) is ACTION

    def test_uppercase_dialogue_stays_dialogue(self):
        assert classify_line(" " * 10 + "WATCH OUT!", CUE) is DIALOGUE
        assert classify_line(" " * 10 + "HOLD ON!", DIALOGUE) is DIALOGUE

    def test_custom_margin(self):
        line = " " * 5 + "Hi."
        assert classify_line(line, CUE, dialogue_margin=5) is DIALOGUE
        assert classify_line(line, CUE, dialogue_margin=10) is ACTION
        assert DEFAULT_DIALOGUE_MARGIN == 10


class TestFixtureScript:
    def test_every_line_kind(self, fixture_script_text, fixture_script_truth):
        elements = classify_lines(fixture_script_text)
        assert len(elements) == len(fixture_script_truth["kinds"])
        for element, want in zip(elements, fixture_script_truth["kinds"]):
            assert element.kind.value == want, (
                f"line {element.line_number}: got {element.kind.value}, "
                f"want {want}: {element.text!r}"
            )

    def test_scene_partition(self, fixture_script_text, fixture_script_truth):
        scenes = parse_script(fixture_script_text)
        assert len(scenes) == fixture_script_truth["scene_count"]
        assert [s.heading for s in scenes] == fixture_script_truth["headings"]
        starts = [s.elements[0].line_number for s in scenes]
        assert starts == fixture_script_truth["scene_start_lines"]
        # Scenes partition the whole line stream without gaps or overlap.
        covered = [e.line_number for s in scenes for e in s.elements]
        assert covered == list(range(1, len(fixture_script_truth["kinds"]) + 1))
        assert [s.index for s in scenes] == list(range(len(scenes)))

    def test_serialize_reparse_fixed_point(self, fixture_script_text):
        elements = classify_lines(fixture_script_text)
        rendered = serialize_elements(elements)
        again = classify_lines(rendered)
        assert [(e.kind, e.text) for e in again] == [
            (e.kind, e.text) for e in elements
        ]
        # Fully stable from here on: serializing again is an identity.
        assert serialize_elements(again) == rendered

    def test_sentences_are_clean(self, fixture_script_text):
        scenes = parse_script(fixture_script_text)
        for scene in scenes:
            for sentence in scene.sentences:
                assert sentence == sentence.lower()
                assert sentence.strip() == sentence
                assert sentence  # never empty


class TestPreamble:
    def test_blank_only_preamble_is_dropped(self):
        text = "\n\n\nINT. LAB - DAY\n\nWork continues.\n"
        scenes = parse_script(text)
        assert len(scenes) == 1
        assert scenes[0].heading == "INT. LAB - DAY"

    def test_content_preamble_is_kept(self):
        text = "A title card.\n\nINT. LAB - DAY\n\nWork continues.\n"
        scenes = parse_script(text)
        assert len(scenes) == 2
        assert scenes[0].heading == ""
        assert scenes[1].heading == "INT. LAB - DAY"

    def test_no_headings_at_all(self):
        scenes = parse_script("Just some prose.\nMore prose.\n")
        assert len(scenes) == 1
        assert scenes[0].heading == ""

    def test_empty_text(self):
        assert parse_script("") == []
        assert parse_script("\n\n\n") == []


class TestTextHelpers:
    def test_clean_tokens(self):
        assert clean_tokens("Hello, World!") == ["hello", "world"]
        # Punctuation is removed wherever it appears inside a token.
        assert clean_tokens("it's a mid-sentence test") == [
            "its",
            "a",
            "midsentence",
            "test",
        ]
        assert clean_tokens("...") == []
        assert clean_tokens("") == []

    def test_split_sentences(self):
        parts = split_sentences("One. Two! Three? Four")
        assert len(parts) == 4
        assert parts[0].strip() == "One"
        assert parts[-1].strip() == "Four"
        assert split_sentences("No terminal punctuation") == [
            "No terminal punctuation"
        ]
        assert split_sentences("") == []

    def test_extract_meaningful_text_filters_kinds(self):
        text = (
            "INT. LAB - DAY\n"
            "\n"
            "The machine hums.\n"
            "\n"
            "                      ADA\n"
            "                (softly)\n"
            "          It works.\n"
        )
        scene = parse_script(text)[0]
        tokens = extract_meaningful_text(scene)
        assert tokens == ["the", "machine", "hums", "it", "works"]
        assert "ada" not in tokens
        assert "softly" not in tokens

    def test_scenes_to_dict_shape(self, fixture_script_text):
        doc = scenes_to_dict(parse_script(fixture_script_text))
        assert set(doc) == {"scenes"}
        first = doc["scenes"][0]
        assert set(first) == {"index", "heading", "elements", "sentences"}
        assert first["elements"][0]["kind"] == "action"
        assert {"kind", "text", "line"} == set(first["elements"][0])
