"""Reference stories from the upstream benchmark families, used as oracle
test vectors, plus their expected answers."""

TANGERINE_TEXT = (
    "Olivia, Chloe, Oliver, Lily and Avery entered the playroom. "
    "The tangerine is in the blue_crate. "
    "Lily likes the blue_treasure_chest. "
    "Olivia moved the tangerine to the blue_pantry. "
    "Olivia likes the red_pantry. "
    "Olivia exited the playroom. "
    "Chloe made no movements and stayed in the playroom for 1 minute. "
    "Avery lost his watch. "
    "Chloe exited the playroom. "
    "Oliver made no movements and stayed in the playroom for 1 minute. "
    "Oliver exited the playroom. "
    "Lily moved the tangerine to the red_bottle. "
    "Lily exited the playroom. "
    "Avery moved the tangerine to the blue_crate. "
    "Avery exited the playroom. "
    "Olivia, Chloe, Oliver, Lily and Avery entered the waiting_room. "
    "Olivia, Lily and Oliver entered the playroom. "
    "The tangerine is in the blue_crate. "
    "Olivia moved the tangerine to the blue_pantry. "
    "Olivia exited the playroom. "
    "Lily made no movements and stayed in the playroom for 1 minute. "
    "Lily exited the playroom. "
    "Oliver made no movements and stayed in the playroom for 1 minute. "
    "Oliver exited the playroom. "
    "Olivia, Lily and Oliver entered the waiting_room. "
    "Olivia saw a monkey. "
    "Olivia, Oliver, Lily and Avery entered the playroom. "
    "The tangerine is in the blue_pantry. "
    "Olivia made no movements and stayed in the playroom for 1 minute. "
    "Olivia exited the playroom. "
    "Oliver lost his phone. "
    "Oliver moved the tangerine to the red_drawer. "
    "Oliver exited the playroom. "
    "Lily moved the tangerine to the green_suitcase. "
    "Lily exited the playroom. "
    "Avery made no movements and stayed in the playroom for 1 minute. "
    "Avery exited the playroom. "
    "Oliver lost his gloves. "
    "Olivia, Oliver, Lily and Avery entered the waiting_room."
)
TANGERINE_QUESTION = "Where does Oliver think Chloe thinks Lily thinks Avery thinks the tangerine is?"
TANGERINE_ANSWER = "blue_pantry"

TOMI_TEXT = (
    "Amelia entered the hall. "
    "Mila loves the plum. "
    "Hunter loves the tomato. "
    "Mila entered the lounge. "
    "Hunter entered the hall. "
    "The jeans is in the container. "
    "Amelia moved the jeans to the treasure_chest. "
    "Hunter exited the hall. "
    "Amelia exited the hall. "
    "Hunter entered the hall."
)
TOMI_QUESTION = "Where does Amelia think that Hunter searches for the jeans?"
TOMI_ANSWER = "treasure_chest"

EXPLORE_STRUCT_TEXT = (
    "Brody entered the back room of the thrift store. "
    "Brody moved the vintage typewriter to the cardboard box, "
    "which is also located in the back room of the thrift store. "
    "While this action was happening, Lucas witnessed this action in secret (and only this action). "
    "Evelyn entered the back room of the thrift store. "
    "Lucas entered the back room of the thrift store. "
    "Evelyn moved the vintage typewriter to the plastic storage bin, "
    "which is also located in the back room of the thrift store."
)
EXPLORE_QUESTION = "Where does Evelyn search for the vintage typewriter?"
EXPLORE_ANSWER = "plastic storage bin"

EXPLORE_INFILLED_TEXT = (
    "The back room of the thrift store was quiet and dimly lit, with cardboard boxes stacked "
    "against the walls and morning sunlight barely peeking through the grimy high window. "
    "The air was thick with the smell of old fabrics and forgotten items, and the silence was "
    "almost palpable, broken only by the faint hum of the old store. As Brody entered the back "
    "room, the soft creak of the door seemed to amplify in the stillness, a solitary sound that "
    "broke the morning calm. In a move that didn't escape Lucas's watchful gaze, the vintage "
    "typewriter glided off its perch, landing softly within the corrugated walls of a cardboard "
    "box in the corner. With a gentle creak, the back room door swung open for Evelyn, who swept "
    "in with a purposeful stride, closely followed by Lucas. The back room was once again quiet, "
    "the only sign of activity being the soft clinking of the plastic storage bin's lid as Evelyn "
    "securely placed the vintage typewriter inside, her task complete."
)

# Single-chapter deception scenario with a private claim after everyone has
# regrouped; exercises the testimony/trust rules.
TOMATO_TEXT = (
    "Ella, Mila, Benjamin, Gracie and William entered the tv_room. "
    "The tomato is in the red_envelope. "
    "Ella made no movements and stayed in the tv_room for 1 minute. "
    "Ella lost his phone. "
    "Ella exited the tv_room. "
    "Mila moved the tomato to the blue_bathtub. "
    "Mila exited the tv_room. "
    "Benjamin made no movements and stayed in the tv_room for 1 minute. "
    "Benjamin exited the tv_room. "
    "Gracie moved the tomato to the red_bucket. "
    "Gracie exited the tv_room. "
    "William moved the tomato to the red_envelope. "
    "William exited the tv_room. "
    "Benjamin saw a cat. "
    "Ella, Mila, Benjamin, Gracie and William entered the waiting_room. "
    "Benjamin privately told Ella that the tomato is in the blue_bathtub now."
)
TOMATO_QUESTION = "Where does Gracie think William thinks Benjamin thinks Ella thinks the tomato is?"
TOMATO_ANSWER = "red_envelope"
