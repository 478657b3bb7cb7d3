package main

import (
	"context"
	"os"

	"cloud.google.com/go/pubsub"
)

func Handler(ctx context.Context, body []byte) error {
	client, err := pubsub.NewClient(ctx, "example-project")
	if err != nil {
		return err
	}
	topic := client.Topic(os.Getenv("JOB_TOPIC"))
	topic.Publish(ctx, &pubsub.Message{Data: body})
	return nil
}
